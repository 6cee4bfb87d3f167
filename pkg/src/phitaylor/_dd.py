"""Double-double arrays with error-free BLAS matrix products.

A value is the unevaluated sum ``hi + lo`` of two float64 (or complex128)
arrays, giving roughly 106 significant bits. Elementwise operations use the
classic error-free transformations (TwoSum, Dekker's TwoProduct).

Matrix products use the splitting scheme of Ozaki, Ogita, Oishi and Rump
(Numer. Algorithms 59, 2012): each operand is cut into slices whose entries
share a per-row (per-column) exponent grid and carry few enough bits that
every slice product is computed *exactly* by an ordinary float64 GEMM. The
exact slice products are then summed in double-double. The cost is a couple
of dozen BLAS calls per product instead of an O(N^3) Python loop.
"""
import math
from fractions import Fraction

import numpy as np
import scipy.sparse

_SPLITTER = 134217729.0  # 2^27 + 1
_TARGET_BITS = 112


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def fast_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod_real(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dd_from_fraction(x):
    """Nearest double-double to a rational (or int)."""
    x = Fraction(x)
    hi = float(x)
    return hi, float(x - Fraction(hi))


def scale(hi, lo, ch, cl):
    """``(hi + lo) * (ch + cl)`` for a real double-double scalar ``c``."""
    if np.iscomplexobj(hi) or np.iscomplexobj(lo):
        hi = np.asarray(hi, dtype=np.complex128)
        lo = np.asarray(lo, dtype=np.complex128)
        re = scale(hi.real, lo.real, ch, cl)
        im = scale(hi.imag, lo.imag, ch, cl)
        return re[0] + 1j * im[0], re[1] + 1j * im[1]
    p, e = _two_prod_real(hi, ch)
    e = e + (hi * cl + lo * ch)
    return fast_two_sum(p, e)


def add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e = e + t
    s, e = fast_two_sum(s, e)
    e = e + f
    return fast_two_sum(s, e)


def _cmax(x, axis):
    if np.iscomplexobj(x):
        x = np.maximum(np.abs(x.real), np.abs(x.imag))
    else:
        x = np.abs(x)
    return np.max(x, axis=axis, keepdims=True) if x.size else x


def _extract(r, sigma):
    if np.iscomplexobj(r):
        re = (r.real + sigma) - sigma
        im = (r.imag + sigma) - sigma
        return re + 1j * im
    return (r + sigma) - sigma


def _beta(n_terms):
    # slice products summed over n_terms stay below 2^53 units
    return math.ceil((53 + math.log2(max(n_terms, 1))) / 2) + 1


def slices(hi, lo, axis, n_terms, count):
    """Cut ``hi + lo`` into ``count`` exactly-multipliable slices.

    ``axis=1`` shares exponents along rows (left operand), ``axis=0`` along
    columns (right operand).
    """
    beta = _beta(n_terms)
    r = np.array(hi, copy=True)
    l = np.array(lo, copy=True)
    out = []
    for _ in range(count):
        mu = _cmax(r, axis) + _cmax(l, axis)
        if not np.any(mu):
            break
        _, e = np.frexp(mu)
        e = np.where(mu > 0, e, 0)
        sigma = np.ldexp(1.0, e + beta)
        piece = _extract(r, sigma)
        out.append(piece)
        r, l = two_sum(r - piece, l)
    return out


def _plan(n_terms):
    bits = 53 - _beta(n_terms)
    return math.ceil(_TARGET_BITS / bits)


def accumulate(terms):
    """Double-double sum of exact double terms (smallest first is best)."""
    hi = np.zeros_like(terms[0])
    lo = np.zeros_like(terms[0])
    for t in terms:
        hi, e = two_sum(hi, t)
        lo = lo + e
    return fast_two_sum(hi, lo)


def matmul(ah, al, bh, bl):
    """Double-double product of two double-double matrices."""
    complex_ = any(np.iscomplexobj(x) for x in (ah, al, bh, bl))
    n_terms = ah.shape[1] * (2 if complex_ else 1)
    count = _plan(n_terms)
    sa = slices(ah, al, 1, n_terms, count)
    sb = slices(bh, bl, 0, n_terms, count)
    shape = (ah.shape[0], bh.shape[1])
    dtype = np.complex128 if complex_ else np.float64
    if not sa or not sb:
        z = np.zeros(shape, dtype=dtype)
        return z, z.copy()
    terms = []
    for total in range(count + 1, 1, -1):
        for i in range(1, total):
            j = total - i
            if i <= len(sa) and j <= len(sb):
                terms.append(sa[i - 1] @ sb[j - 1])
    return accumulate(terms)


class SlicedOperator:
    """A fixed double matrix pre-split for repeated exact products.

    Accepts dense arrays and scipy sparse matrices. Slices are cached per
    exactness bound, which doubles when the right operand is complex.
    """

    def __init__(self, a):
        self.sparse = scipy.sparse.issparse(a)
        self.matrix = scipy.sparse.csr_array(a) if self.sparse else np.asarray(a)
        self.shape = self.matrix.shape
        data = self.matrix.data if self.sparse else self.matrix
        self.complex = np.iscomplexobj(data)
        self._cache = {}

    def _pieces(self, n_terms):
        if n_terms not in self._cache:
            count = _plan(n_terms)
            if self.sparse:
                pieces = _sparse_slices(self.matrix, n_terms, count)
            else:
                pieces = slices(self.matrix, np.zeros_like(self.matrix), 1,
                                n_terms, count)
            self._cache[n_terms] = (count, pieces)
        return self._cache[n_terms]

    def apply(self, xh, xl):
        """Double-double ``A @ x`` for a double-double vector or block."""
        complex_ = self.complex or np.iscomplexobj(xh) or np.iscomplexobj(xl)
        n_terms = self.shape[1] * (2 if complex_ else 1)
        count, pieces = self._pieces(n_terms)
        sx = slices(xh, xl, 0, n_terms, count)
        if not sx or not pieces:
            dtype = np.complex128 if complex_ else np.float64
            z = np.zeros((self.shape[0],) + np.shape(xh)[1:], dtype=dtype)
            return z, z.copy()
        terms = []
        for total in range(count + 1, 1, -1):
            for i in range(1, total):
                j = total - i
                if i <= len(pieces) and j <= len(sx):
                    terms.append(pieces[i - 1] @ sx[j - 1])
        return accumulate(terms)


def _sparse_slices(a, n_terms, count):
    beta = _beta(n_terms)
    rows = np.repeat(np.arange(a.shape[0]), np.diff(a.indptr))
    complex_ = np.iscomplexobj(a.data)
    r = a.data.copy()
    out = []
    for _ in range(count):
        mag = np.maximum(np.abs(r.real), np.abs(r.imag)) if complex_ else np.abs(r)
        mu = np.zeros(a.shape[0])
        np.maximum.at(mu, rows, mag)
        if not np.any(mu):
            break
        _, e = np.frexp(mu)
        sigma = np.ldexp(1.0, np.where(mu > 0, e, 0) + beta)[rows]
        piece = _extract(r, sigma)
        out.append(scipy.sparse.csr_array((piece, a.indices, a.indptr), shape=a.shape))
        r = r - piece
    return out
