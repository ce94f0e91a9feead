"""ADMM solver for the non-negative, affine, low-rank self-expressive code.

Problem (``K`` is the Gram matrix, linear or kernel)::

    min_G  ||G||_* + lam/2 Tr(K - 2 K G + G^T K G) + mu Tr(G L_hat G^T)
    s.t.   G^T 1 = 1,  G >= 0,  diag(G) = 0

The splitting introduces ``U`` (nuclear norm) and ``G_plus`` (non-negativity
and zero diagonal) with multipliers ``alpha_U``, ``alpha_plus``, ``alpha_one``.
"""

import logging
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import DimensionError, ParameterError
from .numerics import ShiftedSylvester, nuclear_norm, svt

logger = logging.getLogger(__name__)

RESIDUAL_NAMES = ("delta_gamma", "gamma_plus_gap", "u_gap", "affine_gap")


@dataclass
class SolverConfig:
    lam: float = 3.0
    mu: float = 0.3
    k: int = 4
    rho0: float = 0.1
    delta_rho: float = 0.1
    rho_max: float = 1e6
    epsilon: float = 1e-4
    max_iters: int = 500
    # raise rho0 so every Gamma-subproblem is strongly convex (L_hat is indefinite)
    convexify: bool = True

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be > 0, got {self.lam}")
        if self.mu < 0:
            raise ParameterError(f"mu must be >= 0, got {self.mu}")
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if not self.rho0 > 0 or self.delta_rho < 0 or self.rho_max < self.rho0:
            raise ParameterError("need rho0 > 0, delta_rho >= 0, rho_max >= rho0")
        if not self.epsilon > 0 or self.max_iters < 1:
            raise ParameterError("need epsilon > 0 and max_iters >= 1")


@dataclass
class SolverState:
    gamma: np.ndarray
    gamma_plus: np.ndarray
    U: np.ndarray
    alpha_plus: np.ndarray
    alpha_U: np.ndarray
    alpha_one: np.ndarray
    rho: float
    iter: int = 0
    residuals: list = field(default_factory=list)

    @classmethod
    def zeros(cls, n, rho):
        z = lambda: np.zeros((n, n))
        return cls(z(), z(), z(), z(), z(), np.zeros(n), float(rho))


@dataclass
class SolverReport:
    iterations: int
    converged: bool
    final_residuals: dict
    objective: float
    wall_time: float
    rho0: float
    objective_history: list = field(default_factory=list)
    residual_history: list = field(default_factory=list)
    rho_history: list = field(default_factory=list)

    def summary(self):
        """Scalar fields only (no histories), for results documents."""
        d = asdict(self)
        for key in ("objective_history", "residual_history", "rho_history"):
            d.pop(key)
        return d


def objective(gram, loc, gamma, lam, mu):
    """``||G||_* + lam/2 Tr(K - 2 K G + G^T K G) + mu Tr(G L_hat G^T)``."""
    K = np.asarray(gram, dtype=float)
    G = np.asarray(gamma, dtype=float)
    KG = K @ G
    rep = np.trace(K) - 2.0 * np.trace(KG) + np.sum(G * KG)
    lsp = np.sum((G @ loc.L_hat) * G)
    return float(nuclear_norm(G) + 0.5 * lam * rep + mu * lsp)


def gamma_system(gram, loc, cfg):
    """Cached solver for the Gamma-update.

    The update solves ``(lam K + 2 rho I + rho 11^T) G + G (2 mu L_hat) = R``;
    ``lam K`` and ``2 mu L_hat`` are fixed, so only the shift ``2 rho`` and the
    rank-one weight ``rho`` change between iterations.
    """
    K = np.asarray(gram, dtype=float)
    return ShiftedSylvester(cfg.lam * K, 2.0 * cfg.mu * loc.L_hat)


def gamma_rhs(state, gram, cfg):
    K = np.asarray(gram, dtype=float)
    rho = state.rho
    R = cfg.lam * K + rho * (state.gamma_plus + state.U + 1.0)
    R -= state.alpha_U + state.alpha_plus
    R -= state.alpha_one[None, :]
    return R


def update_gamma(state, gram, loc, cfg, system=None):
    """Minimize the augmented Lagrangian over Gamma with everything else fixed."""
    if system is None:
        system = gamma_system(gram, loc, cfg)
    R = gamma_rhs(state, gram, cfg)
    return system.solve(R, shift=2.0 * state.rho, rank_one=state.rho)


def project_nonneg(M):
    """Clip at zero and zero the diagonal."""
    P = np.maximum(M, 0.0)
    np.fill_diagonal(P, 0.0)
    return P


def convex_rho0(loc, cfg):
    """Smallest admissible starting penalty.

    ``2 rho I + 2 mu L_hat`` must stay positive definite for the Gamma-step
    to be a strongly convex minimization; ``L_hat`` has negative eigenvalues
    coming from the far-neighbour term.
    """
    if not cfg.convexify or cfg.mu == 0:
        return cfg.rho0
    lmin = float(np.linalg.eigvalsh(loc.L_hat)[0])
    needed = 1.1 * cfg.mu * max(0.0, -lmin)
    return max(cfg.rho0, needed)


def finalize_code(gamma_plus):
    """Zero the diagonal, clip and renormalize columns to sum to one."""
    G = project_nonneg(gamma_plus)
    sums = G.sum(axis=0)
    ok = sums > 0
    G[:, ok] /= sums[ok]
    return G


def admm_solve(gram, loc, cfg, callback=None):
    """Run ADMM from an all-zero start.

    Parameters
    ----------
    gram : GramMatrix or array_like, shape (N, N)
    loc : LocalityStructure
    cfg : SolverConfig
    callback : callable, optional
        Called as ``callback(state)`` after every iteration.

    Returns
    -------
    gamma : ndarray, shape (N, N)
        Final non-negative iterate with zero diagonal and unit column sums.
    report : SolverReport
    """
    K = np.asarray(gram, dtype=float)
    n = K.shape[0]
    if loc.L_hat.shape != (n, n):
        raise DimensionError(f"locality structure is {loc.L_hat.shape}, gram is {K.shape}")
    t0 = time.perf_counter()
    system = gamma_system(K, loc, cfg)
    rho0 = convex_rho0(loc, cfg)
    state = SolverState.zeros(n, rho0)
    ones = np.ones(n)
    converged = False
    objectives, rhos = [], []

    for it in range(1, cfg.max_iters + 1):
        rho = state.rho
        rhos.append(rho)
        prev = state.gamma
        G = update_gamma(state, K, loc, cfg, system)
        U = svt(G + state.alpha_U / rho, 1.0 / rho)
        Gp = project_nonneg(G + state.alpha_plus / rho)
        state.alpha_plus = state.alpha_plus + rho * (G - Gp)
        state.alpha_U = state.alpha_U + rho * (G - U)
        affine = G.T @ ones - ones
        state.alpha_one = state.alpha_one + rho * affine
        state.gamma, state.gamma_plus, state.U = G, Gp, U
        state.rho = min(rho * (1.0 + cfg.delta_rho), cfg.rho_max)
        state.iter = it

        res = (
            float(np.max(np.abs(G - prev))),
            float(np.max(np.abs(Gp - G))),
            float(np.max(np.abs(U - G))),
            float(np.max(np.abs(affine))),
        )
        state.residuals.append(res)
        objectives.append(objective(K, loc, Gp, cfg.lam, cfg.mu))
        if callback is not None:
            callback(state)
        if max(res) <= cfg.epsilon:
            converged = True
            break

    gamma = finalize_code(state.gamma_plus)
    report = SolverReport(
        iterations=state.iter,
        converged=converged,
        final_residuals=dict(zip(RESIDUAL_NAMES, state.residuals[-1])),
        objective=objective(K, loc, gamma, cfg.lam, cfg.mu),
        wall_time=time.perf_counter() - t0,
        rho0=rho0,
        objective_history=objectives,
        residual_history=[list(r) for r in state.residuals],
        rho_history=rhos,
    )
    if not converged:
        logger.warning("ADMM stopped after %d iterations without converging: %s",
                       state.iter, report.final_residuals)
    return gamma, report
