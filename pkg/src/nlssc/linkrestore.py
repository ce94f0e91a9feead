"""Link-restore post-processing of non-negative code matrices.

For a code vector ``g`` (one column of the code matrix) and every sample
``i`` it uses, unused samples ``s`` that are close to ``i`` in the sense
``||x_i - x_s||^2 < tau ||x_i||^2`` receive a share of ``g_i`` proportional
to ``<x_i, x_s>``. The total mass of the column is unchanged. All inner
products come from a Gram matrix, so the same code serves kernel spaces.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePointError, DimensionError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RestoreConfig:
    tau: float = 0.2
    repeats: int = 1

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ParameterError(f"tau must lie in [0, 1], got {self.tau}")
        if self.repeats < 1:
            raise ParameterError("repeats must be >= 1")


def closeness_mask(gram, tau):
    """``mask[i, s]`` is True when ``s`` may absorb mass from ``i``.

    ``K_ss - 2 K_is < (tau - 1) K_ii`` with ``s != i`` and ``K_is > 0``
    (a non-positive inner product would yield a negative code entry).
    """
    K = np.asarray(gram, dtype=float)
    diag = np.diag(K)
    mask = (diag[None, :] - 2.0 * K) < ((tau - 1.0) * diag)[:, None]
    mask &= K > 0
    np.fill_diagonal(mask, False)
    return mask


def restore_column(gamma_col, col_index, gram, cfg=RestoreConfig(), mask=None, stats=None):
    """Restore broken links of one code column; returns a new vector.

    ``stats``, when given, is a dict that receives ``added`` (number of new
    nonzero entries) and ``skipped`` (samples skipped for a non-positive
    normalizer).
    """
    K = np.asarray(gram, dtype=float)
    g = np.array(gamma_col, dtype=float)
    n = g.size
    if K.shape != (n, n):
        raise DimensionError(f"column of length {n} vs gram {K.shape}")
    if mask is None:
        mask = closeness_mask(K, cfg.tau)
    added = skipped = 0
    used = [i for i in np.flatnonzero(g) if i != col_index]
    for i in used:
        k_ii = K[i, i]
        if k_ii <= 0:
            raise DegeneratePointError(f"sample {i} has non-positive self inner product {k_ii}")
        cand = mask[i] & (g == 0)
        cand[col_index] = False
        s_idx = np.flatnonzero(cand)
        if s_idx.size == 0:
            continue
        total = k_ii + K[i, s_idx].sum()
        if total <= 0:
            skipped += 1
            logger.debug("link-restore: skipping sample %d (normalizer %.3g)", i, total)
            continue
        g_i = g[i] * k_ii / total
        g[s_idx] = g_i * K[i, s_idx] / k_ii
        g[i] = g_i
        added += s_idx.size
    if stats is not None:
        stats["added"] = stats.get("added", 0) + added
        stats["skipped"] = stats.get("skipped", 0) + skipped
    return g


def restore_all(gamma, gram, cfg=RestoreConfig()):
    """Apply :func:`restore_column` to every column.

    Returns
    -------
    restored : ndarray, shape (N, N)
    added : ndarray of int, shape (N,)
        New links per column.
    """
    G = np.asarray(gamma, dtype=float)
    K = np.asarray(gram, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or K.shape != G.shape:
        raise DimensionError(f"code matrix {G.shape} and gram {K.shape} must be equal squares")
    if G.min(initial=0.0) < 0:
        raise ParameterError("link-restore needs a non-negative code matrix")
    mask = closeness_mask(K, cfg.tau)
    out = G.copy()
    added = np.zeros(G.shape[1], dtype=int)
    for _ in range(cfg.repeats):
        for j in range(G.shape[1]):
            stats = {}
            try:
                out[:, j] = restore_column(out[:, j], j, K, cfg, mask=mask, stats=stats)
            except DegeneratePointError as exc:
                raise DegeneratePointError(f"column {j}: {exc}") from exc
            added[j] += stats["added"]
    return out, added
