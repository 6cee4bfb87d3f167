"""Extended-precision reference values and error metrics.

The oracle avoids the library's route entirely: phi(A) is read off the
exponential of the augmented matrix ``[[A, I], [0, 0]]``, and the
exponential is a degree-40 Taylor sum of ``2^-k A`` (``||2^-k A||_1 <= 1/8``)
followed by ``k`` squarings, all in double-double arithmetic. Vector
results use the same Taylor sum stepped along the affine flow, which works
for sparse operators too.

Everything here is for tests and ``--check`` runs; none of it is fast.
"""
import math
from fractions import Fraction

import mpmath
import numpy as np
import scipy.sparse

from . import _dd
from .exceptions import DomainError, OracleScaleError, ShapeError
from .matrix import SparseMatrix

EXPM_MAX_N = 1024
PHI_MAX_N = 512
FLOW_MAX_N = 20000
DEGREE = 40
SCALED_NORM = 0.125
_SERIES_CUTOFF = 1e-8

_INV_FACT = [_dd.dd_from_fraction(Fraction(1, math.factorial(j)))
             for j in range(DEGREE + 1)]


def _dense_input(a, limit):
    if isinstance(a, SparseMatrix):
        a = a.toarray()
    elif scipy.sparse.issparse(a):
        a = a.toarray()
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > limit:
        raise OracleScaleError(f"N={a.shape[0]} exceeds the oracle limit {limit}")
    dtype = np.complex128 if np.iscomplexobj(a) else np.float64
    a = a.astype(dtype)
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def _add_identity(hi, lo, ch, cl):
    hi, lo = hi.copy(), lo.copy()
    idx = np.diag_indices_from(hi)
    h, l = _dd.add(hi[idx], lo[idx], np.full(len(idx[0]), ch), np.full(len(idx[0]), cl))
    hi[idx], lo[idx] = h, l
    return hi, lo


def _block(powers, first, count):
    """Double-double ``sum_i X^i / (first + i)!`` for ``i < count``."""
    ch, cl = _INV_FACT[first]
    zero = np.zeros_like(powers[1][0])
    hi, lo = _add_identity(zero, zero, ch, cl)
    for i in range(1, count):
        ch, cl = _INV_FACT[first + i]
        th, tl = _dd.scale(*powers[i], ch, cl)
        hi, lo = _dd.add(hi, lo, th, tl)
    return hi, lo


def _expm_dd(a):
    norm = float(np.abs(a).sum(axis=0).max()) if a.size else 0.0
    k = max(0, math.ceil(math.log2(norm / SCALED_NORM))) if norm > 0 else 0
    x = a * 2.0 ** -k
    q = math.isqrt(DEGREE - 1) + 1
    r = DEGREE // q
    powers = [None, (x, np.zeros_like(x))]
    for _ in range(2, q + 1):
        powers.append(_dd.matmul(*powers[-1], *powers[1]))
    acc = _block(powers, q * r, DEGREE - q * r + 1)
    for blk in range(r - 1, -1, -1):
        acc = _dd.matmul(*acc, *powers[q])
        acc = _dd.add(*acc, *_block(powers, q * blk, q))
    for _ in range(k):
        acc = _dd.matmul(*acc, *acc)
    return acc


def expm_ref(a):
    """``exp(A)`` in double-double, rounded to double. ``N <= 1024``."""
    a = _dense_input(a, EXPM_MAX_N)
    hi, lo = _expm_dd(a)
    return hi + lo


def exp_phi_ref(a):
    """``(exp(A), phi(A))`` from one augmented exponential. ``N <= 512``."""
    a = _dense_input(a, PHI_MAX_N)
    n = a.shape[0]
    big = np.zeros((2 * n, 2 * n), dtype=a.dtype)
    big[:n, :n] = a
    big[:n, n:] = np.eye(n)
    hi, lo = _expm_dd(big)
    full = hi + lo
    return full[:n, :n].copy(), full[:n, n:].copy()


def phi_ref(a):
    """``phi(A)`` as the top-right block of ``exp([[A, I], [0, 0]])``."""
    return exp_phi_ref(a)[1]


def _operator(a):
    if isinstance(a, SparseMatrix):
        return a.to_scipy()
    if scipy.sparse.issparse(a):
        return scipy.sparse.csr_array(a)
    return np.asarray(a)


def _flow(ta, b0, b1, weight):
    """``exp(tA) b0 + weight * phi(tA) b1`` by double-double Taylor steps.

    The flow is split into ``S = ceil(||tA||_1)`` steps so each step's
    operator has unit norm at most; each step sums the series to degree 40.
    """
    n = ta.shape[0]
    if ta.shape != (n, n):
        raise ShapeError(f"expected a square matrix, got shape {ta.shape}")
    if n > FLOW_MAX_N:
        raise OracleScaleError(f"N={n} exceeds the oracle limit {FLOW_MAX_N}")
    b0 = np.asarray(b0)
    b1 = np.asarray(b1)
    if b0.shape[0] != n or b1.shape != b0.shape:
        raise ShapeError(f"vectors of shape {b0.shape}, {b1.shape} do not fit N={n}")
    norm = float(abs(ta).sum(axis=0).max()) if n else 0.0
    steps = max(1, math.ceil(norm))
    sliced = _dd.SlicedOperator(ta)
    data = ta.data if scipy.sparse.issparse(ta) else ta
    complex_ = any(np.iscomplexobj(v) for v in (data, b0, b1))
    dtype = np.complex128 if complex_ else np.float64
    xh = b0.astype(dtype)
    xl = np.zeros_like(xh)
    fh, fl = _dd.scale(b1.astype(dtype), np.zeros_like(xh),
                       *_dd.dd_from_fraction(Fraction(weight) / steps))
    inv = [_dd.dd_from_fraction(Fraction(1, steps * k)) for k in range(1, DEGREE + 1)]
    for _ in range(steps):
        wh, wl = sliced.apply(xh, xl)
        wh, wl = _dd.add(*_dd.scale(wh, wl, *inv[0]), fh, fl)
        acc = _dd.add(xh, xl, wh, wl)
        for k in range(2, DEGREE + 1):
            wh, wl = _dd.scale(*sliced.apply(wh, wl), *inv[k - 1])
            acc = _dd.add(*acc, wh, wl)
        xh, xl = acc
    return xh + xl


def affine_flow_ref(a, t, b0, b1):
    """``exp(tA) b0 + t phi(tA) b1`` for dense or sparse ``A``.

    ``tA`` is rounded to double first, as the library forms it.
    """
    return _flow(_operator(a) * t, b0, b1, t)


def phi_action_ref(a, b, t=1.0):
    """``phi(tA) b`` for dense or sparse ``A``."""
    b = np.asarray(b)
    return _flow(_operator(a) * t, np.zeros_like(b), b, 1)


def _check_pair(y, y_ref):
    y = np.asarray(y)
    y_ref = np.asarray(y_ref)
    if y.shape != y_ref.shape:
        raise ShapeError(f"shape mismatch {y.shape} vs {y_ref.shape}")
    return y, y_ref


def _one_norm(x):
    if x.ndim == 1:
        return float(np.abs(x).sum())
    return float(np.abs(x).sum(axis=0).max()) if x.size else 0.0


def rel_err_1(y, y_ref):
    """``||y - y_ref||_1 / ||y_ref||_1`` (induced matrix norm for 2-D input)."""
    y, y_ref = _check_pair(y, y_ref)
    denom = _one_norm(y_ref)
    if denom == 0:
        raise DomainError("reference has zero norm")
    return _one_norm(y - y_ref) / denom


def rel_err_2(y, y_ref):
    """``||y - y_ref||_2 / ||y_ref||_2`` (Frobenius for blocks)."""
    y, y_ref = _check_pair(y, y_ref)
    denom = float(np.linalg.norm(y_ref))
    if denom == 0:
        raise DomainError("reference has zero norm")
    return float(np.linalg.norm(y - y_ref)) / denom


def phi_scalar(z):
    """``(e^z - 1) / z`` correctly rounded, with the series for tiny ``|z|``."""
    if z == 0:
        return 1.0
    with mpmath.workprec(128):
        zm = mpmath.mpmathify(z)
        if abs(z) < _SERIES_CUTOFF:
            val = 1 + zm / 2 + zm ** 2 / 6 + zm ** 3 / 24
        else:
            val = mpmath.expm1(zm) / zm
        if isinstance(z, complex) or np.iscomplexobj(z):
            return complex(val)
        return float(val)
