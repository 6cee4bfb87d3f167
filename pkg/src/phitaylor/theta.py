"""Backward-error series and the theta_m thresholds.

For the degree-``m`` approximant ``T~_m(x) = sum_{k=0}^{m+1} x^k / k!`` write
``T~_m(x) = exp(x + h(x))`` with ``h(x) = log(exp(-x) T~_m(x)) =
sum_{k>=m+2} c_k x^k``. The relative backward error of the scaled method is
bounded by ``h~(x) = sum |c_k| x^(k-1)`` evaluated at the scaled norm, and
``theta_m`` is the largest ``x`` with ``h~(x) <= tol``.

The series is built in 256-bit arithmetic with mpmath. The resulting table
ships as a plain-text constants file so that runtime code never needs
extended precision.
"""
import functools
import math
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import mpmath

from ._validation import check_positive_int
from .exceptions import DomainError, ParameterError, ThetaSaturationWarning

PRECISION_BITS = 256
EXTRA_TERMS = 150
GUARD = 20.0
DOUBLE_TOL = 2.0 ** -53
DEFAULT_M_MAX = 55
_DATA_FILE = "theta_2e-53.txt"


@dataclass(frozen=True)
class BackwardSeries:
    """Coefficients ``c_k`` of ``h`` for ``k = m+2 .. K`` (mpmath mpf)."""

    m: int
    coefficients: tuple
    K: int

    def coefficient(self, k):
        if k < self.m + 2 or k > self.K:
            return mpmath.mpf(0)
        return self.coefficients[k - self.m - 2]


def _remainder_coefficients(m, K):
    # exp(-x) * T~_m(x) = 1 + u(x); for n >= m+2 the coefficient of x^n is
    # (1/n!) sum_{k<=m+1} (-1)^(n-k) C(n,k), an exact integer over n!.
    u = [mpmath.mpf(0)] * (K + 1)
    for n in range(m + 2, K + 1):
        numer = sum((-1) ** (n - k) * math.comb(n, k) for k in range(m + 2))
        u[n] = mpmath.mpf(numer) / math.factorial(n)
    return u


def derive_series(m, K=None):
    """Series of ``h(x) = log(exp(-x) T~_m(x))`` through order ``K``.

    ``log(1 + u) = u - u^2/2 + u^3/3 - ...`` is composed term by term; since
    ``u`` starts at order ``m + 2`` only ``floor(K / (m+2))`` powers matter.
    """
    m = check_positive_int(m, "m")
    if K is None:
        K = m + EXTRA_TERMS
    K = check_positive_int(K, "K")
    if K < m + 10:
        raise ParameterError(f"truncation K={K} must be at least m + 10")
    lead = m + 2
    with mpmath.workprec(PRECISION_BITS):
        u = _remainder_coefficients(m, K)
        c = [mpmath.mpf(0)] * (K + 1)
        power = list(u)
        j = 1
        while True:
            sign = 1 if j % 2 else -1
            for n in range(j * lead, K + 1):
                if power[n]:
                    c[n] += sign * power[n] / j
            j += 1
            if j * lead > K:
                break
            nxt = [mpmath.mpf(0)] * (K + 1)
            for i in range((j - 1) * lead, K + 1 - lead):
                pi = power[i]
                if not pi:
                    continue
                for k in range(lead, K + 1 - i):
                    nxt[i + k] += pi * u[k]
            power = nxt
        coeffs = tuple(+ck for ck in c[lead:])
    return BackwardSeries(m=m, coefficients=coeffs, K=K)


def _h_tilde_mp(series, x):
    # Horner in x over |c_k| x^(k-1), k = m+2..K
    acc = mpmath.mpf(0)
    for ck in reversed(series.coefficients):
        acc = acc * x + abs(ck)
    return acc * x ** (series.m + 1)


def h_tilde(series, x):
    """``sum_{k=m+2}^K |c_k| x^(k-1)``, rounded to double."""
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    if x > GUARD:
        raise DomainError(f"x={x} exceeds the series guard {GUARD}")
    with mpmath.workprec(PRECISION_BITS):
        return float(_h_tilde_mp(series, mpmath.mpf(x)))


def _tail_estimate(series, x):
    """Geometric bound on the terms beyond ``K`` at ``x``.

    Individual coefficients can vanish and their magnitudes oscillate, so
    the decay rate comes from the largest terms of two blocks of ten, thirty
    orders apart, rather than from neighbouring ratios.
    """
    terms = [abs(series.coefficient(k)) * x ** (k - 1)
             for k in range(series.K - 39, series.K + 1)]
    first, last = max(terms[:10]), max(terms[-10:])
    if not last:
        return mpmath.mpf(0)
    if not first:
        return mpmath.inf
    rho = (last / first) ** (mpmath.mpf(1) / 30)
    if rho >= 1:
        return mpmath.inf
    return 10 * last / (1 - rho)


def solve_theta(series, tol=DOUBLE_TOL, rel_width=1e-6):
    """Largest ``theta`` in ``[0, GUARD]`` with ``h~(theta) <= tol``.

    Bisection on a logarithmic scale to relative width ``rel_width``; the
    returned value is the lower end of the final bracket, so it always
    satisfies the bound. Emits :class:`ThetaSaturationWarning` and returns
    ``GUARD`` when the bound holds on the whole interval.
    """
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    with mpmath.workprec(PRECISION_BITS):
        tol_mp = mpmath.mpf(tol)
        hi = mpmath.mpf(GUARD)
        if _h_tilde_mp(series, hi) <= tol_mp:
            warnings.warn(f"h~ stays below {tol} up to x={GUARD} (m={series.m})",
                          ThetaSaturationWarning, stacklevel=2)
            return GUARD
        lo = hi
        while _h_tilde_mp(series, lo) > tol_mp:
            lo /= 16
            if lo < mpmath.mpf(2) ** -1000:
                raise ParameterError("tolerance below the resolvable range")
        while hi / lo - 1 > rel_width:
            mid = mpmath.sqrt(lo * hi)
            if _h_tilde_mp(series, mid) <= tol_mp:
                lo = mid
            else:
                hi = mid
        if _tail_estimate(series, lo) >= tol_mp * mpmath.mpf("1e-3"):
            raise ParameterError(
                f"series truncated at K={series.K} is not accurate enough at "
                f"x={float(lo):.3g}; increase K")
        return float(lo)


@dataclass(frozen=True)
class ThetaTable:
    """Thresholds ``theta_m`` for ``m = 1 .. m_max`` at a fixed tolerance."""

    tolerance: float
    values: tuple
    extra_terms: int = EXTRA_TERMS

    @property
    def m_max(self):
        return len(self.values)

    def __getitem__(self, m):
        if not 1 <= m <= self.m_max:
            raise ParameterError(f"theta_{m} not tabulated (1..{self.m_max})")
        return self.values[m - 1]

    def __len__(self):
        return len(self.values)

    def items(self):
        return [(m, self.values[m - 1]) for m in range(1, self.m_max + 1)]

    def dumps(self):
        lines = [f"# tolerance {self.tolerance!r} K m+{self.extra_terms}"]
        lines += [f"{m}\t{theta:.16e}" for m, theta in self.items()]
        return "\n".join(lines) + "\n"

    def save(self, path):
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text):
        tolerance = None
        extra = EXTRA_TERMS
        values = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                fields = line[1:].split()
                if len(fields) >= 2 and fields[0] == "tolerance":
                    tolerance = float(fields[1])
                if len(fields) >= 4 and fields[2] == "K":
                    extra = int(fields[3].split("+")[-1])
                continue
            try:
                m_str, theta_str = line.split()
                values[int(m_str)] = float(theta_str)
            except ValueError as exc:
                raise ParameterError(f"bad theta table line {lineno}: {line!r}") from exc
        if tolerance is None:
            raise ParameterError("theta table header lacks a tolerance")
        ms = sorted(values)
        if ms != list(range(1, len(ms) + 1)):
            raise ParameterError("theta table must list m = 1, 2, ... without gaps")
        return cls(tolerance=tolerance, values=tuple(values[m] for m in ms),
                   extra_terms=extra)

    @classmethod
    def load(cls, path):
        return cls.loads(Path(path).read_text())


def build_theta_table(m_max=DEFAULT_M_MAX, tol=DOUBLE_TOL, extra_terms=EXTRA_TERMS):
    """Derive ``theta_m`` for every ``m`` in ``1..m_max``."""
    m_max = check_positive_int(m_max, "m_max")
    values = []
    for m in range(1, m_max + 1):
        series = derive_series(m, m + extra_terms)
        values.append(solve_theta(series, tol))
    return ThetaTable(tolerance=float(tol), values=tuple(values),
                      extra_terms=extra_terms)


@functools.lru_cache(maxsize=None)
def default_theta_table():
    """The shipped table for ``tol = 2^-53``, ``m = 1..55``."""
    text = resources.files("phitaylor.data").joinpath(_DATA_FILE).read_text()
    return ThetaTable.loads(text)
