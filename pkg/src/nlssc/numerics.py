"""Symmetric Sylvester solves and singular value thresholding."""

import numpy as np

from .errors import DimensionError, SingularSystemError

SINGULAR_RTOL = 1e-12


def _check_symmetric(M, name, atol=1e-10):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got {M.shape}")
    if np.max(np.abs(M - M.T), initial=0.0) > atol:
        raise DimensionError(f"{name} is not symmetric")
    return 0.5 * (M + M.T)


def _gap_check(denom, scale):
    gap = float(np.min(np.abs(denom)))
    if gap <= SINGULAR_RTOL * scale:
        raise SingularSystemError(
            f"Sylvester pencil is singular: min |lambda_i(A) + lambda_j(B)| = {gap:.3g}",
            min_gap=gap,
        )


def sylvester_solve(A, Bm, C):
    """Solve ``A X + X Bm = C`` for symmetric ``A`` and ``Bm``.

    Both coefficient matrices are diagonalized by ``eigh``; in the joint
    eigenbasis the system is entrywise division by ``lambda_i(A) + lambda_j(Bm)``.

    Raises
    ------
    SingularSystemError
        If some ``|lambda_i(A) + lambda_j(Bm)|`` is below ``1e-12 (||A|| + ||Bm||)``.
    """
    A = _check_symmetric(A, "A")
    Bm = _check_symmetric(Bm, "Bm")
    C = np.asarray(C, dtype=float)
    if C.shape != (A.shape[0], Bm.shape[0]):
        raise DimensionError(f"C has shape {C.shape}, expected {(A.shape[0], Bm.shape[0])}")
    ea, Qa = np.linalg.eigh(A)
    eb, Qb = np.linalg.eigh(Bm)
    denom = ea[:, None] + eb[None, :]
    _gap_check(denom, np.abs(ea).max(initial=0.0) + np.abs(eb).max(initial=0.0))
    return Qa @ ((Qa.T @ C @ Qb) / denom) @ Qb.T


class ShiftedSylvester:
    """Repeated solves of ``(M0 + s I + c u u^T) X + X Bm = C`` with cached eigenbases.

    ``M0`` and ``Bm`` are decomposed once. The shift ``s`` only moves the
    eigenvalues of ``M0`` (eigenvectors are shared), and the optional rank-one
    term ``c u u^T`` is folded in per column with the Sherman-Morrison
    formula, so a solve costs a handful of dense matrix products.
    """

    def __init__(self, M0, Bm):
        M0 = _check_symmetric(M0, "M0")
        Bm = _check_symmetric(Bm, "Bm")
        if M0.shape != Bm.shape:
            raise DimensionError("M0 and Bm must have the same shape")
        self.eig_m0, self.Q = np.linalg.eigh(M0)
        self.eig_b, self.P = np.linalg.eigh(Bm)
        self._scale = np.abs(self.eig_m0).max() + np.abs(self.eig_b).max()

    def shifted_eigh(self, shift):
        """Eigenpairs of ``M0 + shift I`` obtained from the cache."""
        return self.eig_m0 + shift, self.Q

    def solve(self, C, shift=0.0, rank_one=0.0, u=None):
        Q, P = self.Q, self.P
        denom = (self.eig_m0 + shift)[:, None] + self.eig_b[None, :]
        _gap_check(denom, self._scale + abs(shift))
        # column j of Y solves (M0 + s I + eig_b[j] I) y = (C P)[:, j]
        Y_hat = (Q.T @ C @ P) / denom
        if rank_one == 0.0:
            return Q @ Y_hat @ P.T
        u = np.ones(Q.shape[0]) if u is None else np.asarray(u, dtype=float)
        u_hat = Q.T @ u
        Z_hat = u_hat[:, None] / denom
        uY = u_hat @ Y_hat
        uZ = u_hat @ Z_hat
        sm_denom = 1.0 + rank_one * uZ
        _gap_check(sm_denom, 1.0)
        X_hat = Y_hat - Z_hat * (rank_one * uY / sm_denom)[None, :]
        return Q @ X_hat @ P.T


def svt(M, threshold):
    """Singular value thresholding, the prox of ``threshold * ||.||_*``.

    Returns ``P max(S - threshold, 0) Q^T`` for ``M = P S Q^T``.
    """
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    M = np.asarray(M, dtype=float)
    P, s, Qt = np.linalg.svd(M, full_matrices=False)
    s = np.maximum(s - threshold, 0.0)
    keep = s > 0
    return (P[:, keep] * s[keep]) @ Qt[keep]


def nuclear_norm(M):
    return float(np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False).sum())
