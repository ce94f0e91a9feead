"""Affinity construction and normalized spectral clustering."""

import numpy as np
from sklearn.cluster import KMeans

from .errors import InvariantViolationError, ParameterError

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-6


def build_affinity(gamma, atol=1e-8):
    """``A = G + G^T`` with zero diagonal; ``G`` must be non-negative."""
    G = np.asarray(gamma, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise InvariantViolationError(f"code matrix must be square, got {G.shape}")
    if G.size and G.min() < -atol:
        raise InvariantViolationError(f"code matrix has negative entry {G.min():.3g}")
    A = G + G.T
    np.fill_diagonal(A, 0.0)
    return A


def spectral_embedding(aff, n_clusters):
    """Row-normalized top eigenvectors of ``D^{-1/2} A D^{-1/2}``."""
    A = np.asarray(aff, dtype=float)
    deg = A.sum(axis=1)
    deg[deg <= 0] = 1.0  # isolated vertices
    d = 1.0 / np.sqrt(deg)
    S = d[:, None] * A * d[None, :]
    S = 0.5 * (S + S.T)
    _, vecs = np.linalg.eigh(S)
    V = vecs[:, ::-1][:, :n_clusters]
    norms = np.linalg.norm(V, axis=1)
    nz = norms > 1e-12
    V[nz] /= norms[nz, None]
    V[~nz] = 0.0
    return V


def spectral_cluster(aff, n_clusters, seed=0):
    """Cluster the graph with affinity ``aff`` into ``n_clusters`` groups.

    Returns labels in ``1..n_clusters``. k-means uses k-means++ seeding and
    keeps the best of 10 restarts, so results are reproducible per ``seed``.
    """
    A = np.asarray(aff, dtype=float)
    n = A.shape[0]
    if n_clusters < 2:
        raise ParameterError(f"n_clusters must be >= 2, got {n_clusters}")
    if n_clusters > n:
        raise ParameterError(f"n_clusters={n_clusters} exceeds N={n}")
    V = spectral_embedding(A, n_clusters)
    km = KMeans(n_clusters=n_clusters, init="k-means++", n_init=KMEANS_RESTARTS,
                max_iter=KMEANS_MAX_ITER, tol=KMEANS_TOL, random_state=seed)
    return km.fit_predict(V) + 1


def intra_cluster_edges(aff, labels, atol=0.0):
    """Number of (unordered) positive-weight edges joining samples of the same label."""
    A = np.asarray(aff)
    labels = np.asarray(labels)
    same = labels[:, None] == labels[None, :]
    edges = np.triu((A > atol) & same, k=1)
    return int(edges.sum())
