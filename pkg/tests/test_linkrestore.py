import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlssc.errors import DegeneratePointError, ParameterError
from nlssc.kernels import build_gram
from nlssc.linkrestore import RestoreConfig, closeness_mask, restore_all, restore_column


def hand_gram():
    # x1 = (0, 1), x2 = (1, 0), x3 = (1, 0)
    return build_gram(np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 0.0]]))


def test_hand_example():
    out = restore_column(np.array([0.0, 1.0, 0.0]), 0, hand_gram(), RestoreConfig(0.2))
    assert out.tolist() == [0.0, 0.5, 0.5]


def test_criterion_matches_relative_distance(rng):
    X = rng.standard_normal((3, 15))
    tau = 0.4
    mask = closeness_mask(build_gram(X), tau)
    for i in range(15):
        for s in range(15):
            rel = np.sum((X[:, i] - X[:, s]) ** 2) / np.sum(X[:, i] ** 2)
            assert mask[i, s] == (i != s and rel < tau)


def test_no_close_points_unchanged():
    X = np.array([[1.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
    col = np.array([0.0, 1.0, 0.0])
    np.testing.assert_array_equal(restore_column(col, 0, build_gram(X)), col)


def test_tau_zero_unchanged():
    col = np.array([0.0, 1.0, 0.0])
    np.testing.assert_array_equal(restore_column(col, 0, hand_gram(), RestoreConfig(0.0)), col)


def test_own_index_never_restored():
    # column 2 uses sample 1; sample 2 (identical to 1) is the column itself
    col = np.array([0.0, 1.0, 0.0])
    np.testing.assert_array_equal(restore_column(col, 2, hand_gram()), col)


def test_degenerate_point():
    X = np.array([[0.0, 1.0], [0.0, 1.0]])
    with pytest.raises(DegeneratePointError):
        restore_column(np.array([1.0, 0.0]), 1, build_gram(X))


def test_tau_range():
    with pytest.raises(ParameterError):
        RestoreConfig(tau=1.5)


def test_newly_restored_entries_are_not_candidates():
    # samples 1, 2, 3 identical; column 0 uses 1 and 2. Processing 1 restores 3,
    # so processing 2 finds no zero-valued candidate left.
    X = np.array([[0.0, 1.0, 1.0, 1.0], [1.0, 0.0, 0.0, 0.0]])
    out = restore_column(np.array([0.0, 0.6, 0.4, 0.0]), 0, build_gram(X))
    np.testing.assert_allclose(out, [0.0, 0.3, 0.4, 0.3], atol=1e-15)


def random_column(rng, n, j):
    g = np.abs(rng.standard_normal(n)) * (rng.uniform(size=n) < 0.3)
    g[j] = 0.0
    return g


def test_column_sums_preserved(rng):
    for trial in range(100):
        X = np.abs(rng.standard_normal((4, 20)))
        kind = ("linear", "gaussian", "hik")[trial % 3]
        gram = build_gram(X, kind)
        j = trial % 20
        g = random_column(rng, 20, j)
        out = restore_column(g, j, gram, RestoreConfig(tau=0.5))
        assert abs(out.sum() - g.sum()) <= 1e-12
        assert out.min() >= 0 and out[j] == 0


@pytest.mark.parametrize("kind", ["gaussian", "hik"])
def test_non_negativity_positive_kernels(rng, kind):
    X = np.abs(rng.standard_normal((5, 25)))
    gram = build_gram(X, kind)
    G = np.abs(rng.standard_normal((25, 25))) * (rng.uniform(size=(25, 25)) < 0.2)
    np.fill_diagonal(G, 0)
    out, _ = restore_all(G, gram, RestoreConfig(tau=0.9))
    assert out.min() >= 0
    assert np.all(np.diag(out) == 0)


def test_support_growth(rng):
    X = rng.standard_normal((3, 20))
    X = np.hstack([X, X[:, :5] + 1e-3 * rng.standard_normal((3, 5))])
    gram = build_gram(X)
    G = np.abs(rng.standard_normal((25, 25))) * (rng.uniform(size=(25, 25)) < 0.3)
    np.fill_diagonal(G, 0)
    out, added = restore_all(G, gram)
    assert np.all(out[G > 0] > 0)
    assert added.sum() == np.count_nonzero(out) - np.count_nonzero(G) > 0


def test_duplicated_points_gain_links():
    # samples 0/1 and 2/3 are duplicates; each column uses only one copy
    X = np.array([[1.0, 1.0, 0.0, 0.0], [0.2, 0.2, 1.0, 1.0]])
    # column 0 uses 1 (fine, its own duplicate); column 1 uses 3 -> restores 2
    G = np.array([[0.0, 0.0, 0.0, 0.0],
                  [1.0, 0.0, 0.0, 0.0],
                  [0.0, 0.0, 0.0, 1.0],
                  [0.0, 1.0, 1.0, 0.0]])
    out, added = restore_all(G, build_gram(X))
    assert added.tolist() == [0, 1, 0, 0]
    np.testing.assert_allclose(out[:, 1], [0.0, 0.0, 0.5, 0.5])
    np.testing.assert_allclose(out.sum(axis=0), G.sum(axis=0), atol=1e-12)


def test_dense_within_cluster_unchanged(rng):
    X = np.hstack([np.ones((2, 4)) + 0.01 * rng.standard_normal((2, 4)),
                   -np.ones((2, 4)) + 0.01 * rng.standard_normal((2, 4))])
    G = np.zeros((8, 8))
    G[:4, :4] = 1 / 3
    G[4:, 4:] = 1 / 3
    np.fill_diagonal(G, 0)
    out, added = restore_all(G, build_gram(X))
    np.testing.assert_array_equal(out, G)
    assert added.sum() == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_restore_all_sums_property(seed, tau):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((3, 12))
    X = np.hstack([X, X[:, :4] * (1 + 0.01 * rng.standard_normal(4))])
    G = np.abs(rng.standard_normal((16, 16))) * (rng.uniform(size=(16, 16)) < 0.3)
    np.fill_diagonal(G, 0)
    out, _ = restore_all(G, build_gram(X), RestoreConfig(tau=tau))
    np.testing.assert_allclose(out.sum(axis=0), G.sum(axis=0), atol=1e-12)
    assert out.min() >= 0 and np.all(np.diag(out) == 0)
