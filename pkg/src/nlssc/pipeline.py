"""End-to-end runs: Gram -> locality -> ADMM -> link-restore -> spectral clustering."""

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import clusterer, linkrestore, locality
from .data import as_data_matrix, as_labels, results_document
from .errors import DimensionError, NLSSCError, ParameterError
from .kernels import build_gram, precomputed_gram
from .metrics import clustering_error, nmi
from .solver import SolverConfig, admm_solve

logger = logging.getLogger(__name__)

MODES = ("nlssc", "nlkssc")

DEFAULT_LAMBDAS = tuple(float(v) for v in np.round(np.arange(1.0, 7.0 + 1e-9, 0.5), 10))
DEFAULT_MUS = tuple(float(v) for v in np.round(np.arange(0.1, 1.0 + 1e-9, 0.1), 10))
DEFAULT_KS = tuple(range(3, 9))

GRID_COLUMNS = ("lambda", "mu", "k", "mean_ce", "median_ce", "mean_nmi", "iterations", "error")


@dataclass
class RunConfig:
    mode: str = "nlssc"
    kernel: str = None
    sigma: float = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    restore: linkrestore.RestoreConfig = field(default_factory=linkrestore.RestoreConfig)
    restore_enabled: bool = True
    n_clusters: int = 2
    repeats: int = 10
    seed: int = 0
    neighbor_metric: str = "kernel-induced-distance"
    use_far: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "nlssc":
            if self.kernel not in (None, "linear"):
                raise ParameterError("nlssc always uses the linear Gram; drop --kernel or use nlkssc")
        elif self.kernel is None:
            raise ParameterError("nlkssc requires an explicit kernel kind")
        if self.repeats < 1:
            raise ParameterError("repeats must be >= 1")

    @property
    def kernel_kind(self):
        return "linear" if self.mode == "nlssc" else self.kernel

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        solver = d.pop("solver", {}) or {}
        restore = d.pop("restore", {}) or {}
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(solver=SolverConfig(**solver), restore=linkrestore.RestoreConfig(**restore), **d)


def make_gram(data, cfg):
    if cfg.kernel_kind == "precomputed":
        return precomputed_gram(data)
    return build_gram(data, cfg.kernel_kind, cfg.sigma)


def solve_code(gram, cfg):
    """Locality structure, ADMM solve and optional link-restore for one Gram matrix."""
    nbrs = locality.neighbor_sets(gram, cfg.solver.k, cfg.neighbor_metric)
    loc = locality.build_locality(nbrs, use_far=cfg.use_far)
    gamma, report = admm_solve(gram, loc, cfg.solver)
    restored, added = gamma, np.zeros(gamma.shape[1], dtype=int)
    if cfg.restore_enabled:
        restored, added = linkrestore.restore_all(gamma, gram, cfg.restore)
    return {"nbrs": nbrs, "loc": loc, "gamma": gamma, "restored": restored,
            "links_added": added, "report": report}


def run_cluster(data, cfg, labels=None):
    """Full pipeline on a data matrix (or a precomputed kernel).

    The ADMM solve is deterministic and runs once; spectral clustering runs
    ``cfg.repeats`` times with seeds ``seed .. seed + repeats - 1``.

    Returns
    -------
    doc : dict
        Results document (JSON-ready).
    gamma : ndarray
        Code matrix fed to spectral clustering.
    """
    if cfg.kernel_kind != "precomputed":
        data = as_data_matrix(data)
    gram = make_gram(data, cfg)
    n = gram.n
    if labels is not None:
        labels = as_labels(labels)
        if labels.size != n:
            raise DimensionError(f"{labels.size} labels for {n} samples")
    if cfg.n_clusters > n:
        raise ParameterError(f"n_clusters={cfg.n_clusters} exceeds N={n}")

    sol = solve_code(gram, cfg)
    gamma = sol["restored"]
    aff = clusterer.build_affinity(gamma)
    runs, assignments = [], []
    for r in range(cfg.repeats):
        seed = cfg.seed + r
        pred = clusterer.spectral_cluster(aff, cfg.n_clusters, seed)
        assignments.append(pred)
        run = {"seed": seed}
        if labels is not None:
            run["ce"] = clustering_error(pred, labels)[0]
            run["nmi"] = nmi(pred, labels)
        runs.append(run)

    report = sol["report"]
    metrics, diagnostics = {}, {}
    if labels is not None:
        ces = np.array([r["ce"] for r in runs])
        nmis = np.array([r["nmi"] for r in runs])
        metrics = {"ce": float(ces.mean()), "nmi": float(nmis.mean()),
                   "ce_median": float(np.median(ces)), "nmi_median": float(np.median(nmis)),
                   "ce_percent": float(100.0 * ces.mean())}
        diagnostics = {
            "representativeness_order": locality.representativeness_order(sol["nbrs"], labels),
            "wrong_link_fraction": locality.wrong_link_fraction(sol["nbrs"], labels),
            "intra_cluster_edges": clusterer.intra_cluster_edges(aff, labels),
        }
    extra = {
        "runs": runs,
        "assignments": assignments,
        "restore": {"enabled": cfg.restore_enabled, "tau": cfg.restore.tau,
                    "links_added": int(sol["links_added"].sum()),
                    "links_added_per_column": sol["links_added"]},
        "diagnostics": diagnostics,
        "kernel": {"kind": gram.kind, "sigma": gram.sigma},
    }
    doc = results_document(assignments[0], gamma, metrics, report.summary(),
                           cfg.to_dict(), extra=extra)
    return doc, gamma, sol


def default_grid():
    return {"lambda": DEFAULT_LAMBDAS, "mu": DEFAULT_MUS, "k": DEFAULT_KS}


def grid_cells(grid):
    for key in ("lambda", "mu", "k"):
        if not grid.get(key):
            raise ParameterError(f"grid axis {key!r} is empty")
    return list(itertools.product(grid["lambda"], grid["mu"], grid["k"]))


def _evaluate_cell(args):
    data, labels, cfg, (lam, mu, k) = args
    row = {"lambda": lam, "mu": mu, "k": k, "mean_ce": None, "median_ce": None,
           "mean_nmi": None, "iterations": None, "error": ""}
    try:
        cell_cfg = replace(cfg, solver=replace(cfg.solver, lam=lam, mu=mu, k=int(k)))
        doc, _, _ = run_cluster(data, cell_cfg, labels)
        row.update(mean_ce=doc["ce"], median_ce=doc["metrics"]["ce_median"],
                   mean_nmi=doc["nmi"], iterations=doc["iterations"])
        if not doc["converged"]:
            row["error"] = "not converged"
    except (NLSSCError, np.linalg.LinAlgError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _sort_key(row):
    ce = row["mean_ce"]
    return (ce is None or math.isnan(ce), ce if ce is not None else 0.0,
            row["lambda"], row["mu"], row["k"])


def run_gridsearch(data, labels, cfg, grid=None, workers=1):
    """Evaluate every ``(lambda, mu, k)`` cell; rows sorted by mean CE.

    Failing cells are kept with their error message and sorted last.
    """
    if labels is None:
        raise ParameterError("grid search needs ground-truth labels to score cells")
    grid = grid or default_grid()
    jobs = [(data, labels, cfg, cell) for cell in grid_cells(grid)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_cell, jobs))
    else:
        rows = [_evaluate_cell(job) for job in jobs]
    return sorted(rows, key=_sort_key)


def sensitivity_slice(rows, vary, fixed):
    """Rows with all parameters but ``vary`` fixed, ordered by ``vary``."""
    if vary not in ("lambda", "mu", "k"):
        raise ParameterError(f"cannot vary {vary!r}")
    sel = [r for r in rows if all(math.isclose(r[key], val) for key, val in fixed.items())]
    return sorted(sel, key=lambda r: r[vary])
