"""Input validation helpers shared by the public entry points."""
import numbers

import numpy as np
import scipy.sparse

from .exceptions import ParameterError, ShapeError


def _is_sparse_like(a):
    from .matrix import SparseMatrix

    return isinstance(a, SparseMatrix) or scipy.sparse.issparse(a)


def check_dense(a, name="A"):
    """Return ``a`` as a finite 2-D float64 or complex128 array.

    Real input stays real; anything with a complex dtype becomes complex128.
    """
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=False)
    else:
        try:
            arr = arr.astype(np.float64, copy=False)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"{name} has non-numeric entries") from exc
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains NaN or Inf entries")
    return arr


def check_square(a, name="A", accept_sparse=True):
    """Validate a square operator.

    Dense input is returned as an ndarray (see :func:`check_dense`), sparse
    input (``SparseMatrix`` or any scipy sparse container) as a
    ``SparseMatrix``.
    """
    from .matrix import SparseMatrix

    if _is_sparse_like(a):
        if not accept_sparse:
            raise ParameterError(f"{name} must be dense")
        sp = a if isinstance(a, SparseMatrix) else SparseMatrix.from_scipy(a)
        if not np.all(np.isfinite(sp.data)):
            raise ParameterError(f"{name} contains NaN or Inf entries")
        out = sp
    else:
        out = check_dense(a, name)
    n_rows, n_cols = out.shape
    if n_rows != n_cols:
        raise ShapeError(f"{name} must be square, got shape {out.shape}")
    return out


def check_block(b, n_rows, name="b"):
    """Validate a vector or block of vectors with ``n_rows`` rows.

    Returns ``(block, was_vector)`` where ``block`` is always 2-D.
    """
    arr = np.asarray(b)
    was_vector = arr.ndim == 1
    if was_vector:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be a vector or a 2-D block")
    if arr.shape[0] != n_rows:
        raise ShapeError(
            f"{name} has {arr.shape[0]} rows, operator has {n_rows} columns")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=False)
    else:
        arr = arr.astype(np.float64, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains NaN or Inf entries")
    return arr, was_vector


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return int(value)
