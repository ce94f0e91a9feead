"""Non-negative local subspace sparse clustering (NLSSC) and its kernel variant."""

from .clusterer import build_affinity, spectral_cluster
from .data import SyntheticSpec, generate_synthetic, load_csv, save_results
from .kernels import GramMatrix, build_gram, gaussian_sigma, kernel_distance_sq
from .linkrestore import RestoreConfig, restore_all, restore_column
from .locality import build_locality, neighbor_sets, representativeness_order
from .metrics import clustering_error, nmi
from .numerics import svt, sylvester_solve
from .pipeline import RunConfig, run_cluster, run_gridsearch
from .solver import SolverConfig, admm_solve, objective, update_gamma

__version__ = "0.1.0"
