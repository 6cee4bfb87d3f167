"""Dense and sparse matrix primitives with operation counting.

Dense matrices are plain 2-D numpy arrays (float64 or complex128). Sparse
matrices are :class:`SparseMatrix`, a validated CSR container. Every product
that the phi algorithms pay for goes through :func:`mat_mul` or
:func:`matvec` so that an :class:`OpCounter` can audit the cost model.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse

from .exceptions import ShapeError


@dataclass
class OpCounter:
    """Tally of the expensive operations performed by one evaluation.

    ``matvec_count`` counts single-column products, so applying an operator
    to an ``N x k`` block adds ``k``.
    """

    matmul_count: int = 0
    matvec_count: int = 0
    norm_est_count: int = 0

    def as_dict(self):
        return {
            "matmuls": self.matmul_count,
            "matvecs": self.matvec_count,
            "norm_estimates": self.norm_est_count,
        }


class SparseMatrix:
    """Immutable compressed-sparse-row matrix.

    Column indices are strictly increasing within each row, so every stored
    coordinate is unique. Use :meth:`from_coo` to build from triplets with
    possible duplicates (they are summed).
    """

    __slots__ = ("_csr",)

    def __init__(self, indptr, indices, data, shape):
        n_rows, n_cols = (int(shape[0]), int(shape[1]))
        indptr = np.asarray(indptr, dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64)
        data = np.asarray(data)
        data = data.astype(
            np.complex128 if np.iscomplexobj(data) else np.float64, copy=True)
        if n_rows < 0 or n_cols < 0:
            raise ShapeError(f"invalid shape {shape}")
        if indptr.ndim != 1 or indptr.size != n_rows + 1:
            raise ShapeError("row pointer array must have length rows + 1")
        if indptr[0] != 0 or np.any(np.diff(indptr) < 0):
            raise ShapeError("row pointers must start at 0 and be nondecreasing")
        if data.ndim != 1 or indices.ndim != 1:
            raise ShapeError("index and value arrays must be 1-D")
        if data.size != indptr[-1] or indices.size != indptr[-1]:
            raise ShapeError("value array length must equal the last row pointer")
        if indices.size and (indices.min() < 0 or indices.max() >= n_cols):
            raise ShapeError("column index out of range")
        # strictly increasing columns within each row
        if indices.size > 1:
            row_of = np.repeat(np.arange(n_rows), np.diff(indptr))
            same_row = row_of[1:] == row_of[:-1]
            if np.any(np.diff(indices)[same_row] <= 0):
                raise ShapeError(
                    "column indices must be strictly increasing within a row")
        for arr in (indptr, indices, data):
            arr.flags.writeable = False
        self._csr = scipy.sparse.csr_array(
            (data, indices, indptr), shape=(n_rows, n_cols))

    @classmethod
    def from_coo(cls, rows, cols, values, shape):
        """Build from coordinate triplets; duplicate coordinates are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values)
        if not (rows.shape == cols.shape == values.shape):
            raise ShapeError("rows, cols and values must have equal length")
        n_rows, n_cols = shape
        if rows.size and (rows.min() < 0 or rows.max() >= n_rows
                          or cols.min() < 0 or cols.max() >= n_cols):
            raise ShapeError("coordinate out of range")
        coo = scipy.sparse.coo_array((values, (rows, cols)), shape=shape)
        csr = coo.tocsr()
        csr.sum_duplicates()
        csr.sort_indices()
        return cls(csr.indptr, csr.indices, csr.data, shape)

    @classmethod
    def from_scipy(cls, sp):
        csr = scipy.sparse.csr_array(sp, copy=True)
        csr.sum_duplicates()
        csr.sort_indices()
        return cls(csr.indptr, csr.indices, csr.data, csr.shape)

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a)
        rows, cols = np.nonzero(a)
        return cls.from_coo(rows, cols, a[rows, cols], a.shape)

    @property
    def shape(self):
        return self._csr.shape

    @property
    def nnz(self):
        return int(self._csr.indptr[-1])

    @property
    def dtype(self):
        return self._csr.dtype

    @property
    def indptr(self):
        return self._csr.indptr

    @property
    def indices(self):
        return self._csr.indices

    @property
    def data(self):
        return self._csr.data

    def to_scipy(self):
        """Return a copy as a ``scipy.sparse.csr_array``."""
        return self._csr.copy()

    def toarray(self):
        return self._csr.toarray()

    def scaled(self, factor):
        """Return ``factor * self`` with the same sparsity pattern."""
        return SparseMatrix(self.indptr, self.indices, self.data * factor,
                            self.shape)

    def _apply(self, v):
        return self._csr @ v

    def _apply_adjoint(self, v):
        return self._csr.conj().T @ v

    def __matmul__(self, other):
        return self._csr @ other

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.shape == other.shape
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.data, other.data))

    __hash__ = None

    def __repr__(self):
        return (f"SparseMatrix(shape={self.shape}, nnz={self.nnz}, "
                f"dtype={self.dtype})")


def mat_mul(a, b, counter=None):
    """Dense product ``a @ b``, counted as one matrix multiplication."""
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    if counter is not None:
        counter.matmul_count += 1
    return a @ b


def _columns(v):
    return 1 if v.ndim == 1 else v.shape[1]


def _dense_apply(a, v):
    # Column-at-a-time so a block product equals per-column products exactly.
    if v.ndim == 1:
        return a @ v
    if v.shape[1] == 1:
        return (a @ v[:, 0])[:, None]
    return np.column_stack([a @ v[:, j] for j in range(v.shape[1])])


def matvec(a, v, counter=None):
    """Apply ``a`` (dense or sparse) to a vector or an ``N x k`` block."""
    v = np.asarray(v)
    if a.shape[1] != v.shape[0]:
        raise ShapeError(f"operator has {a.shape[1]} columns, "
                         f"operand has {v.shape[0]} rows")
    if counter is not None:
        counter.matvec_count += _columns(v)
    if isinstance(a, SparseMatrix):
        return a._apply(v)
    return _dense_apply(a, v)


def rmatvec(a, v, counter=None):
    """Apply the conjugate transpose of ``a`` to a vector or block."""
    v = np.asarray(v)
    if a.shape[0] != v.shape[0]:
        raise ShapeError(f"operator has {a.shape[0]} rows, "
                         f"operand has {v.shape[0]} rows")
    if counter is not None:
        counter.matvec_count += _columns(v)
    if isinstance(a, SparseMatrix):
        return a._apply_adjoint(v)
    return _dense_apply(a.conj().T, v)


def sp_matvec(a, v, counter=None):
    """Sparse matrix-vector product ``y_i = sum_j a_ij v_j``."""
    if not isinstance(a, SparseMatrix):
        raise TypeError("sp_matvec expects a SparseMatrix")
    return matvec(a, v, counter)


def one_norm(a):
    """Maximum absolute column sum of a dense or sparse matrix."""
    if isinstance(a, SparseMatrix) or scipy.sparse.issparse(a):
        csr = a._csr if isinstance(a, SparseMatrix) else a
        if csr.shape[0] == 0 or csr.shape[1] == 0:
            return 0.0
        return float(np.max(abs(csr).sum(axis=0)))
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(a), axis=0)))


def identity_like(a):
    return np.eye(a.shape[0], dtype=a.dtype)


def to_dense(a):
    """Return a dense ndarray copy of a dense or sparse matrix."""
    if isinstance(a, SparseMatrix):
        return a.toarray()
    if scipy.sparse.issparse(a):
        return a.toarray()
    return np.array(a)
