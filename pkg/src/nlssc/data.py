"""Data ingestion, result serialization and synthetic subspace data.

Data matrices are kept in columns-are-samples orientation throughout the
package: ``X`` has shape ``(d, N)`` and ``X[:, i]`` is sample ``i``.
"""

import csv
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionError, MalformedInputError, ParameterError

LAYOUTS = ("rows-are-samples", "columns-are-samples")


def as_data_matrix(X):
    """Validate and return ``X`` as a float ``(d, N)`` array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.ndim != 2:
        raise DimensionError(f"data matrix must be 2-D, got ndim={X.ndim}")
    d, n = X.shape
    if d < 1 or n < 2:
        raise DimensionError(f"need d >= 1 and N >= 2, got d={d}, N={n}")
    if not np.all(np.isfinite(X)):
        raise MalformedInputError("data matrix contains non-finite entries")
    return X


def as_labels(labels):
    """Validate an integer label vector (values 1..n)."""
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size == 0:
        raise DimensionError("labels must be a non-empty 1-D vector")
    if not np.issubdtype(labels.dtype, np.integer):
        rounded = np.rint(labels.astype(float))
        if not np.allclose(rounded, labels.astype(float)):
            raise MalformedInputError("labels must be integers")
        labels = rounded
    return labels.astype(int)


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_matrix(path):
    """Read a rectangular numeric CSV (optional header) as a 2-D array."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise MalformedInputError(f"{path}: empty CSV")
    if not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]  # header row
    if not rows:
        raise MalformedInputError(f"{path}: header but no data")
    width = len(rows[0])
    values = []
    for r, row in enumerate(rows, start=1):
        if len(row) != width:
            raise DimensionError(
                f"{path}: data row {r} has {len(row)} columns, expected {width}"
            )
        parsed = []
        for c, cell in enumerate(row, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise MalformedInputError(
                    f"{path}: non-numeric value {cell!r} at data row {r}, column {c}"
                ) from None
        values.append(parsed)
    return np.array(values, dtype=float)


def load_csv(path, layout="rows-are-samples"):
    """Read a numeric CSV into a ``(d, N)`` data matrix.

    Parameters
    ----------
    path : str or path-like
        CSV file. A first row with any non-numeric cell is treated as a header.
    layout : {"rows-are-samples", "columns-are-samples"}
        Orientation of the file. The result is always columns-are-samples.
    """
    if layout not in LAYOUTS:
        raise ParameterError(f"layout must be one of {LAYOUTS}, got {layout!r}")
    table = read_matrix(path)
    X = table.T if layout == "rows-are-samples" else table
    return as_data_matrix(X)


def save_csv(X, path, layout="rows-are-samples"):
    """Write a ``(d, N)`` matrix so that :func:`load_csv` reads it back exactly."""
    if layout not in LAYOUTS:
        raise ParameterError(f"layout must be one of {LAYOUTS}, got {layout!r}")
    X = np.asarray(X, dtype=float)
    table = X.T if layout == "rows-are-samples" else X
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in table:
            writer.writerow([repr(float(v)) for v in row])


def load_labels(path):
    """Read a label vector from a CSV (one column, or one row)."""
    table = read_matrix(path)
    return as_labels(table.ravel())


def save_labels(labels, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for v in np.asarray(labels, dtype=int):
            writer.writerow([int(v)])


@dataclass(frozen=True)
class SyntheticSpec:
    """Union-of-affine-subspaces generator settings."""

    num_subspaces: int = 3
    ambient_dim: int = 30
    subspace_dim: int = 4
    points_per_subspace: int = 50
    noise_std: float = 0.0
    affine_offset_scale: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.num_subspaces < 1:
            raise ParameterError("num_subspaces must be >= 1")
        if not 1 <= self.subspace_dim < self.ambient_dim:
            raise ParameterError("need 1 <= subspace_dim < ambient_dim")
        if self.points_per_subspace <= self.subspace_dim:
            raise ParameterError("points_per_subspace must exceed subspace_dim")
        if self.noise_std < 0 or self.affine_offset_scale < 0:
            raise ParameterError("noise_std and affine_offset_scale must be >= 0")

    @classmethod
    def parse(cls, text, seed=0):
        """Parse ``"<n>x<dim>@<ambient>[,n=<pts>][,noise=<s>][,offset=<r>]"``.

        >>> SyntheticSpec.parse("3x4@30,n=50,noise=0.05").points_per_subspace
        50
        """
        head, *opts = [part.strip() for part in text.split(",")]
        try:
            shape, ambient = head.split("@")
            count, dim = shape.lower().split("x")
            kwargs = dict(
                num_subspaces=int(count), subspace_dim=int(dim), ambient_dim=int(ambient)
            )
        except ValueError:
            raise MalformedInputError(f"bad generator spec head {head!r}") from None
        keys = {"n": ("points_per_subspace", int), "noise": ("noise_std", float),
                "offset": ("affine_offset_scale", float), "seed": ("seed", int)}
        kwargs["seed"] = seed
        for opt in opts:
            key, _, value = opt.partition("=")
            if key not in keys:
                raise MalformedInputError(f"unknown generator option {key!r}")
            name, conv = keys[key]
            try:
                kwargs[name] = conv(value)
            except ValueError:
                raise MalformedInputError(f"bad value for {key!r}: {value!r}") from None
        return cls(**kwargs)


def _uniform_ball(rng, dim, radius):
    direction = rng.standard_normal(dim)
    direction /= np.linalg.norm(direction)
    return radius * rng.uniform() ** (1.0 / dim) * direction


def generate_synthetic(spec):
    """Sample points from a union of affine subspaces.

    Returns
    -------
    X : ndarray, shape (ambient_dim, num_subspaces * points_per_subspace)
    labels : ndarray of int, values 1..num_subspaces, contiguous blocks
    """
    rng = np.random.default_rng(spec.seed)
    blocks, labels = [], []
    for l in range(spec.num_subspaces):
        basis, _ = np.linalg.qr(rng.standard_normal((spec.ambient_dim, spec.subspace_dim)))
        offset = _uniform_ball(rng, spec.ambient_dim, spec.affine_offset_scale)
        coeffs = rng.standard_normal((spec.subspace_dim, spec.points_per_subspace))
        noise = spec.noise_std * rng.standard_normal((spec.ambient_dim, spec.points_per_subspace))
        blocks.append(offset[:, None] + basis @ coeffs + noise)
        labels.append(np.full(spec.points_per_subspace, l + 1))
    return np.hstack(blocks), np.concatenate(labels)


def _clean(value):
    """Make ``value`` JSON-serializable (numpy scalars, arrays, inf/nan)."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if hasattr(value, "__dataclass_fields__"):
        return _clean(asdict(value))
    return value


def results_document(assignment, code=None, metrics=None, report=None, config=None,
                     include_gamma=False, extra=None):
    """Assemble the results mapping written by :func:`save_results`."""
    assignment = np.asarray(assignment, dtype=int)
    metrics = dict(metrics or {})
    report = dict(report or {})
    if code is not None:
        code = np.asarray(code)
        if code.shape != (assignment.size, assignment.size):
            raise DimensionError(
                f"code matrix shape {code.shape} inconsistent with N={assignment.size}"
            )
    doc = {
        "assignment": assignment,
        "ce": metrics.pop("ce", None),
        "nmi": metrics.pop("nmi", None),
        "iterations": report.get("iterations"),
        "converged": report.get("converged"),
        "final_residuals": report.get("final_residuals", {}),
        "config_echo": config or {},
        "metrics": metrics,
        "solver": report,
    }
    if extra:
        doc.update(extra)
    if include_gamma and code is not None:
        rows, cols = np.nonzero(code)
        doc["gamma"] = {
            "shape": list(code.shape),
            "triplets": [[int(i), int(j), float(code[i, j])] for i, j in zip(rows, cols)],
        }
    return _clean(doc)


def save_results(assignment, code, metrics, path, report=None, config=None,
                 include_gamma=False, extra=None):
    """Write a JSON results document; see :func:`results_document`."""
    doc = results_document(assignment, code, metrics, report, config, include_gamma, extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc


def gamma_from_triplets(doc):
    """Rebuild the dense code matrix stored in a results document."""
    shape = tuple(doc["gamma"]["shape"])
    G = np.zeros(shape)
    for i, j, v in doc["gamma"]["triplets"]:
        G[int(i), int(j)] = v
    return G
