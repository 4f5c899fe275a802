"""Validation and small geometric helpers for points on the probability simplex."""
from __future__ import annotations

import numpy as np

from .errors import DataError, ShapeError

__all__ = ["SIMPLEX_TOL", "INTERIOR_EPS", "as_simplex", "interior_project", "vertices"]

#: How far a row sum may be from 1 before the row is rejected.
SIMPLEX_TOL = 1e-5

#: Epsilon used to pull boundary points strictly inside the simplex.
INTERIOR_EPS = 1e-9


def as_simplex(points, tol=SIMPLEX_TOL):
    """Validate an (N, D) array of probability vectors and renormalize rows.

    Rows whose sum is within ``tol`` of 1 are renormalized to sum to 1
    exactly; rows farther away, rows with negative entries, and non-finite
    rows are rejected.

    Returns
    -------
    ndarray
        A float64 copy of shape (N, D) with every row summing to 1.

    Raises
    ------
    ShapeError
        If the input is not two-dimensional or has fewer than 2 columns.
    DataError
        Naming the first offending row index.
    """
    arr = np.array(points, dtype=float, copy=True)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ShapeError(f"expected an (N, D>=2) array, got shape {np.shape(points)}")
    finite = np.isfinite(arr).all(axis=1)
    if not finite.all():
        raise DataError(f"row {int(np.flatnonzero(~finite)[0])} has non-finite entries")
    negative = (arr < -1e-12).any(axis=1)
    if negative.any():
        raise DataError(f"row {int(np.flatnonzero(negative)[0])} has negative entries")
    np.clip(arr, 0.0, None, out=arr)
    sums = arr.sum(axis=1)
    bad = np.abs(sums - 1.0) > tol
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise DataError(f"row {idx} sums to {sums[idx]:.6g}, farther than {tol:g} from 1")
    arr /= sums[:, None]
    return arr


def interior_project(points, eps=INTERIOR_EPS):
    """Pull simplex points strictly inside: x <- (x + eps) / (1 + D * eps).

    Keeps row sums at 1 and every entry >= eps / (1 + D * eps) > 0.
    """
    arr = np.asarray(points, dtype=float)
    d = arr.shape[-1]
    return (arr + eps) / (1.0 + d * eps)


def vertices(k, d):
    """The first k one-hot vertices of the (d-1)-simplex as a (k, d) array."""
    return np.eye(k, d)
