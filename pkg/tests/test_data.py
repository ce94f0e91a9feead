import json

import numpy as np
import pytest

from nlssc.data import (SyntheticSpec, gamma_from_triplets, generate_synthetic, load_csv,
                        load_labels, save_csv, save_labels, save_results)
from nlssc.errors import DimensionError, MalformedInputError, ParameterError


def write(path, text):
    path.write_text(text)
    return path


def test_load_rows_are_samples(tmp_path):
    p = write(tmp_path / "x.csv", "1,2\n3,4\n5,6\n")
    X = load_csv(p, "rows-are-samples")
    assert X.shape == (2, 3)
    np.testing.assert_array_equal(X[:, 0], [1, 2])


def test_load_columns_are_samples(tmp_path):
    p = write(tmp_path / "x.csv", "1,2\n3,4\n5,6\n")
    X = load_csv(p, "columns-are-samples")
    assert X.shape == (3, 2)
    np.testing.assert_array_equal(X[:, 1], [2, 4, 6])


def test_header_is_skipped(tmp_path):
    p = write(tmp_path / "x.csv", "a,b\n1,2\n3,4\n")
    assert load_csv(p).shape == (2, 2)


def test_non_numeric_cell_names_location(tmp_path):
    p = write(tmp_path / "x.csv", "1,2\n3,oops\n")
    with pytest.raises(MalformedInputError, match="row 2, column 2"):
        load_csv(p)


def test_ragged_rows(tmp_path):
    p = write(tmp_path / "x.csv", "1,2\n3\n")
    with pytest.raises(DimensionError):
        load_csv(p)


def test_bad_layout(tmp_path):
    p = write(tmp_path / "x.csv", "1,2\n3,4\n")
    with pytest.raises(ParameterError):
        load_csv(p, "sideways")


@pytest.mark.parametrize("layout", ["rows-are-samples", "columns-are-samples"])
def test_csv_round_trip(tmp_path, rng, layout):
    X = rng.standard_normal((5, 7)) * 10.0 ** rng.integers(-5, 5, size=(5, 7))
    save_csv(X, tmp_path / "x.csv", layout)
    Y = load_csv(tmp_path / "x.csv", layout)
    np.testing.assert_allclose(Y, X, rtol=1e-12, atol=0)


def test_labels_round_trip(tmp_path):
    save_labels([1, 2, 2, 3], tmp_path / "l.csv")
    np.testing.assert_array_equal(load_labels(tmp_path / "l.csv"), [1, 2, 2, 3])


def test_synthetic_shapes():
    X, labels = generate_synthetic(SyntheticSpec(3, 30, 4, 50, noise_std=0.0, seed=1))
    assert X.shape == (30, 150)
    assert np.bincount(labels).tolist() == [0, 50, 50, 50]


def test_synthetic_exact_subspaces():
    spec = SyntheticSpec(3, 30, 4, 50, noise_std=0.0, affine_offset_scale=0.0, seed=2)
    X, labels = generate_synthetic(spec)
    for l in (1, 2, 3):
        block = X[:, labels == l]
        assert np.linalg.matrix_rank(block, tol=1e-9) == 4
        # projection onto the block's own span reproduces every point
        Q, _ = np.linalg.qr(block[:, :4])
        np.testing.assert_allclose(Q @ (Q.T @ block), block, atol=1e-10)


def test_synthetic_affine_blocks_have_subspace_rank():
    spec = SyntheticSpec(2, 10, 3, 20, noise_std=0.0, affine_offset_scale=5.0, seed=3)
    X, labels = generate_synthetic(spec)
    for l in (1, 2):
        block = X[:, labels == l]
        centered = block - block[:, :1]  # offset removed via any member point
        assert np.linalg.matrix_rank(centered, tol=1e-9) == 3
        assert np.linalg.matrix_rank(block, tol=1e-9) == 4


def test_synthetic_deterministic():
    spec = SyntheticSpec(seed=7, noise_std=0.1, affine_offset_scale=1.0)
    X1, l1 = generate_synthetic(spec)
    X2, l2 = generate_synthetic(spec)
    assert X1.tobytes() == X2.tobytes()
    assert l1.tobytes() == l2.tobytes()


@pytest.mark.parametrize("kwargs", [dict(subspace_dim=30), dict(points_per_subspace=4),
                                    dict(noise_std=-1.0)])
def test_synthetic_spec_invariants(kwargs):
    with pytest.raises(ParameterError):
        SyntheticSpec(**kwargs)


def test_spec_parse():
    spec = SyntheticSpec.parse("3x4@30,n=50,noise=0.05,offset=2", seed=9)
    assert spec == SyntheticSpec(3, 30, 4, 50, 0.05, 2.0, 9)
    with pytest.raises(MalformedInputError):
        SyntheticSpec.parse("3by4")


def test_save_results(tmp_path, rng):
    G = np.abs(rng.standard_normal((4, 4)))
    G[G < 0.8] = 0
    doc = save_results([1, 1, 2, 2], G, {"ce": 0.25, "nmi": 0.0}, tmp_path / "r.json",
                       report={"iterations": 12, "converged": True,
                               "final_residuals": {"affine_gap": 1e-5}},
                       config={"mode": "nlssc"}, include_gamma=True)
    loaded = json.loads((tmp_path / "r.json").read_text())
    assert loaded == doc
    assert loaded["assignment"] == [1, 1, 2, 2]
    assert loaded["ce"] == 0.25 and loaded["iterations"] == 12
    assert loaded["config_echo"] == {"mode": "nlssc"}
    np.testing.assert_array_equal(gamma_from_triplets(loaded), G)


def test_save_results_inconsistent_n(tmp_path):
    with pytest.raises(DimensionError):
        save_results([1, 2, 1], np.zeros((4, 4)), {}, tmp_path / "r.json")


def test_save_results_unwritable(tmp_path):
    with pytest.raises(OSError):
        save_results([1, 2], None, {}, tmp_path / "missing" / "r.json")
