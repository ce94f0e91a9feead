"""k-nearest / k-farthest neighbourhoods and the local-separability Laplacian.

The locality term of the objective is ``Tr(G L_hat G^T)`` with
``L_hat = L + B/2``, where ``L = D - W`` is the Laplacian of the symmetrized
k-nearest-neighbour indicator ``W`` and ``B`` is the symmetrized
k-farthest-neighbour indicator.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError
from .kernels import distance_matrix

METRICS = ("kernel-induced-distance", "raw-similarity")


@dataclass(frozen=True)
class NeighborSets:
    """Row ``i`` of ``near`` / ``far`` lists the k nearest / farthest samples to ``i``."""

    near: np.ndarray
    far: np.ndarray
    k: int

    @property
    def n(self):
        return self.near.shape[0]


@dataclass(frozen=True)
class LocalityStructure:
    W_binary: np.ndarray
    B_binary: np.ndarray
    W: np.ndarray
    B: np.ndarray
    L: np.ndarray
    L_hat: np.ndarray


def _first_k(keys, k):
    # stable sort keeps lower indices first among ties
    return np.argsort(keys, axis=1, kind="stable")[:, :k]


def neighbor_sets(gram, k, metric="kernel-induced-distance"):
    """Exact k-nearest and k-farthest neighbours of every sample.

    Parameters
    ----------
    gram : GramMatrix or array_like, shape (N, N)
    k : int
        Neighbourhood size, ``1 <= k <= N - 1``.
    metric : {"kernel-induced-distance", "raw-similarity"}
        Rank by ``K_ii + K_jj - 2 K_ij`` (small = near) or by ``K_ij``
        directly (large = near). Ties go to the lower index.
    """
    K = np.asarray(gram, dtype=float)
    n = K.shape[0]
    if K.ndim != 2 or K.shape[1] != n:
        raise DimensionError(f"gram must be square, got {K.shape}")
    if not 1 <= k <= n - 1:
        raise ParameterError(f"k must satisfy 1 <= k <= N - 1 = {n - 1}, got {k}")
    if metric == "kernel-induced-distance":
        closeness = -distance_matrix(K)
    elif metric == "raw-similarity":
        closeness = K.copy()
    else:
        raise ParameterError(f"unknown neighbour metric {metric!r}; expected one of {METRICS}")
    idx = np.arange(n)
    near_key = -closeness
    near_key[idx, idx] = np.inf
    far_key = closeness.copy()
    far_key[idx, idx] = np.inf
    return NeighborSets(_first_k(near_key, k), _first_k(far_key, k), k)


def _indicator(index_sets, n):
    M = np.zeros((n, n))
    rows = np.repeat(np.arange(n), index_sets.shape[1])
    M[rows, index_sets.ravel()] = 1.0
    return M


def build_locality(nbrs, use_far=True):
    """Build W, B (binary and symmetrized), the Laplacian L and ``L_hat = L + B/2``.

    ``use_far=False`` zeroes B, which reduces the locality term to the
    plain Laplacian smoothness penalty.
    """
    n = nbrs.n
    Wb = _indicator(nbrs.near, n)
    Bb = _indicator(nbrs.far, n) if use_far else np.zeros((n, n))
    W = 0.5 * (Wb + Wb.T)
    B = 0.5 * (Bb + Bb.T)
    L = np.diag(W.sum(axis=1)) - W
    return LocalityStructure(Wb, Bb, W, B, L, L + 0.5 * B)


def split_links(nbrs, labels):
    """Count same-label and cross-label k-nearest links: ``(|W_c|_0, |W_m|_0)``."""
    labels = np.asarray(labels)
    if labels.shape[0] != nbrs.n:
        raise DimensionError(f"{labels.shape[0]} labels for {nbrs.n} samples")
    same = labels[:, None] == labels[nbrs.near]
    return int(same.sum()), int((~same).sum())


def representativeness_order(nbrs, labels):
    """Ratio ``|W_c|_0 / |W_m|_0`` of same-class to cross-class neighbour links.

    Returns ``inf`` when no neighbour link crosses a class boundary. Larger
    values therefore mean more class-consistent neighbourhoods; see
    :func:`wrong_link_fraction` for a bounded alternative.
    """
    n_correct, n_wrong = split_links(nbrs, labels)
    if n_wrong == 0:
        return float("inf")
    return n_correct / n_wrong


def wrong_link_fraction(nbrs, labels):
    """Fraction of k-nearest links that join samples of different classes."""
    n_correct, n_wrong = split_links(nbrs, labels)
    return n_wrong / (n_correct + n_wrong)


def locality_energy(gamma, loc):
    """``Tr(G L_hat G^T)``, the locality term evaluated on code matrix ``gamma``."""
    G = np.asarray(gamma, dtype=float)
    return float(np.einsum("ij,jk,ik->", G, loc.L_hat, G))
