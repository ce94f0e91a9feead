"""Gram / kernel matrices over the columns of a data matrix."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .data import as_data_matrix
from .errors import DegenerateKernelError, DimensionError, InvalidFeatureError, ParameterError

KINDS = ("linear", "gaussian", "hik", "precomputed")


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric ``(N, N)`` matrix of pairwise (feature-space) inner products."""

    values: np.ndarray
    kind: str = "linear"
    sigma: Optional[float] = None

    @property
    def n(self):
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def squared_distances(X):
    """``(N, N)`` matrix of squared Euclidean distances between columns."""
    X = as_data_matrix(X)
    return squareform(pdist(X.T, metric="sqeuclidean"))


def gaussian_sigma(X):
    """Mean squared distance over all distinct pairs of samples.

    This is the default bandwidth of the Gaussian kernel
    ``exp(-||x - y||^2 / sigma)``.
    """
    X = as_data_matrix(X)
    sigma = float(np.mean(pdist(X.T, metric="sqeuclidean")))
    if not sigma > 0:
        raise DegenerateKernelError("all samples coincide; gaussian bandwidth is 0")
    return sigma


def build_gram(X, kind="linear", sigma=None):
    """Build the Gram matrix of ``X`` (columns are samples).

    Parameters
    ----------
    X : array_like, shape (d, N)
    kind : {"linear", "gaussian", "hik"}
        ``linear``: ``X^T X``; ``gaussian``: ``exp(-||x_i - x_j||^2 / sigma)``;
        ``hik``: histogram intersection ``sum_m min(x_i[m], x_j[m])``.
    sigma : float, optional
        Gaussian bandwidth; defaults to :func:`gaussian_sigma`.
    """
    X = as_data_matrix(X)
    if kind == "linear":
        K = X.T @ X
    elif kind == "gaussian":
        if sigma is None:
            sigma = gaussian_sigma(X)
        elif not sigma > 0:
            raise ParameterError(f"gaussian sigma must be > 0, got {sigma}")
        K = np.exp(-squared_distances(X) / sigma)
        np.fill_diagonal(K, 1.0)
    elif kind == "hik":
        if np.any(X < 0):
            raise InvalidFeatureError("histogram intersection kernel needs non-negative features")
        n = X.shape[1]
        K = np.empty((n, n))
        for i in range(n):
            K[i] = np.minimum(X[:, i:i + 1], X).sum(axis=0)
    else:
        raise ParameterError(f"unknown kernel kind {kind!r}; expected one of {KINDS[:3]}")
    K = 0.5 * (K + K.T)
    return GramMatrix(K, kind, float(sigma) if kind == "gaussian" else None)


def precomputed_gram(K, atol=1e-10):
    """Wrap a user-supplied kernel matrix after a symmetry check."""
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] < 2:
        raise DimensionError(f"precomputed kernel must be square N x N (N >= 2), got {K.shape}")
    if not np.all(np.isfinite(K)):
        raise InvalidFeatureError("precomputed kernel has non-finite entries")
    asym = np.max(np.abs(K - K.T))
    if asym > atol * max(1.0, np.max(np.abs(K))):
        raise InvalidFeatureError(f"precomputed kernel is not symmetric (max asymmetry {asym:.3g})")
    return GramMatrix(0.5 * (K + K.T), "precomputed")


def distance_matrix(gram):
    """Kernel-induced squared distances ``K_ii + K_jj - 2 K_ij``, clamped at 0."""
    K = np.asarray(gram, dtype=float)
    diag = np.diag(K)
    D = diag[:, None] + diag[None, :] - 2.0 * K
    np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, 0.0)
    return D


def kernel_distance_sq(gram, i, j):
    K = np.asarray(gram, dtype=float)
    if i == j:
        return 0.0
    return max(0.0, float(K[i, i] + K[j, j] - 2.0 * K[i, j]))
