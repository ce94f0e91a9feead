import numpy as np
import pytest

from nlssc.data import SyntheticSpec, generate_synthetic
from nlssc.kernels import build_gram
from nlssc.locality import build_locality, neighbor_sets
from nlssc.solver import SolverConfig, admm_solve

# the acceptance problem: 3 subspaces of dim 4 in R^30, 50 points each
ACCEPTANCE_SPEC = SyntheticSpec(num_subspaces=3, ambient_dim=30, subspace_dim=4,
                                points_per_subspace=50, noise_std=0.05, seed=0)


@pytest.fixture(scope="session")
def synthetic():
    return generate_synthetic(ACCEPTANCE_SPEC)


@pytest.fixture(scope="session")
def solved(synthetic):
    """ADMM run with lambda=3, mu=0.3, k=4 and a per-iteration trace."""
    X, labels = synthetic
    gram = build_gram(X)
    loc = build_locality(neighbor_sets(gram, 4))
    cfg = SolverConfig(lam=3.0, mu=0.3, k=4)
    trace = []

    def record(state):
        trace.append({
            "gamma": state.gamma.copy(), "gamma_plus": state.gamma_plus.copy(),
            "U": state.U.copy(), "alpha_plus": state.alpha_plus.copy(),
            "alpha_U": state.alpha_U.copy(), "rho_next": state.rho,
        })

    gamma, report = admm_solve(gram, loc, cfg, callback=record)
    return {"X": X, "labels": labels, "gram": gram, "loc": loc, "cfg": cfg,
            "gamma": gamma, "report": report, "trace": trace}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, (ok, detail) in sorted(RESULTS.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {detail}")
