"""Clustering error under optimal label matching, and NMI."""

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionError


def contingency(pred, truth):
    """Contingency table plus the distinct predicted / true label values."""
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise DimensionError(f"length mismatch: {pred.size} predictions, {truth.size} labels")
    if pred.size == 0:
        raise DimensionError("empty label vectors")
    p_vals, p_idx = np.unique(pred, return_inverse=True)
    t_vals, t_idx = np.unique(truth, return_inverse=True)
    table = np.zeros((p_vals.size, t_vals.size), dtype=np.int64)
    np.add.at(table, (p_idx, t_idx), 1)
    return table, p_vals, t_vals


def clustering_error(pred, truth):
    """Fraction of samples misassigned under the best one-to-one label matching.

    Returns
    -------
    ce : float
    matching : dict
        Predicted label -> matched true label (unmatched predicted labels omitted).
    """
    table, p_vals, t_vals = contingency(pred, truth)
    size = max(table.shape)
    square = np.zeros((size, size), dtype=np.int64)
    square[: table.shape[0], : table.shape[1]] = table
    rows, cols = linear_sum_assignment(square, maximize=True)
    agree = int(square[rows, cols].sum())
    matching = {
        p_vals[r].item(): t_vals[c].item()
        for r, c in zip(rows, cols)
        if r < p_vals.size and c < t_vals.size
    }
    return 1.0 - agree / table.sum(), matching


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth):
    """Normalized mutual information ``I / sqrt(H_pred H_truth)`` (natural log).

    Two single-cluster partitions score 1; a single-cluster partition against
    a non-trivial one scores 0.
    """
    table, _, _ = contingency(pred, truth)
    n = table.sum()
    h_p = _entropy(table.sum(axis=1), n)
    h_t = _entropy(table.sum(axis=0), n)
    if h_p == 0.0 and h_t == 0.0:
        return 1.0
    if h_p == 0.0 or h_t == 0.0:
        return 0.0
    outer = np.outer(table.sum(axis=1), table.sum(axis=0))
    nz = table > 0
    mi = float((table[nz] / n * np.log(table[nz] * n / outer[nz])).sum())
    return float(np.clip(mi / np.sqrt(h_p * h_t), 0.0, 1.0))


def evaluate(pred, truth):
    ce, matching = clustering_error(pred, truth)
    return {"ce": ce, "nmi": nmi(pred, truth), "matching": matching}
