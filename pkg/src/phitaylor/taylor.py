"""Truncated Taylor series of phi, evaluated by Paterson-Stockmeyer.

``T_m(X) = sum_{k=0}^m X^k / (k+1)!`` approximates ``phi(X)`` and
``X T_m(X) + I`` approximates ``exp(X)`` through order ``m + 1``.
"""
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int
from .exceptions import ParameterError, ShapeError
from .matrix import identity_like, mat_mul

#: Degrees at which the Paterson-Stockmeyer cost strictly increases.
OPTIMAL_DEGREES = (2, 4, 6, 9, 12, 16, 20, 25, 30, 36, 42, 49)


def phi_coefficient(k):
    """``1 / (k+1)!`` correctly rounded to double."""
    return 1 / math.factorial(k + 1)


def ps_cost(m):
    """Matrix products needed for ``T_m``: ``ceil(sqrt m) + floor(m / ceil(sqrt m)) - 2``.

    Exact for degrees in :data:`OPTIMAL_DEGREES` (and any ``m`` divisible by
    ``ceil(sqrt m)``); otherwise the Horner stage needs one extra product.
    """
    q = math.isqrt(m - 1) + 1 if m > 0 else 0
    return q + m // q - 2


@dataclass(frozen=True)
class PSPlan:
    """Block layout of ``T_m = sum_k B_k (X^q)^k``.

    ``blocks[k][i]`` is the coefficient of ``X^i`` in ``B_k``.
    """

    m: int
    q: int
    r: int
    blocks: tuple

    @property
    def tail_is_scalar(self):
        """True when the top block is a multiple of the identity."""
        return len(self.blocks[self.r]) == 1

    @property
    def matmuls(self):
        """Products needed to form ``X^2..X^q`` and run the Horner stage."""
        horner = self.r - 1 if self.tail_is_scalar else self.r
        return (self.q - 1) + max(horner, 0)


def ps_plan(m):
    """Paterson-Stockmeyer layout for degree ``m`` with ``q = ceil(sqrt m)``."""
    m = check_positive_int(m, "m")
    q = math.isqrt(m - 1) + 1
    r = m // q
    blocks = []
    for k in range(r):
        blocks.append(tuple(phi_coefficient(q * k + i) for i in range(q)))
    blocks.append(tuple(phi_coefficient(q * r + i) for i in range(m - q * r + 1)))
    return PSPlan(m=m, q=q, r=r, blocks=tuple(blocks))


def matrix_powers(x, q, counter=None):
    """Return ``[I, X, X^2, ..., X^q]`` using ``q - 1`` products."""
    powers = [identity_like(x), x]
    for _ in range(2, q + 1):
        powers.append(mat_mul(powers[-1], x, counter))
    return powers


def _block_sum(coeffs, x_powers):
    # smallest coefficient (highest power) first
    out = np.zeros_like(x_powers[1])
    for i in range(len(coeffs) - 1, -1, -1):
        out += coeffs[i] * x_powers[i]
    return out


def eval_T(x_powers, plan, counter=None):
    """Evaluate ``T_m(X)`` from the precomputed powers ``[I, X, ..., X^q]``.

    The Horner stage costs ``r - 1`` products when the top block is scalar
    (always the case for ``m`` in :data:`OPTIMAL_DEGREES`), ``r`` otherwise.
    """
    if len(x_powers) != plan.q + 1:
        raise ParameterError(
            f"expected {plan.q + 1} powers (I..X^{plan.q}), got {len(x_powers)}")
    xq = x_powers[plan.q]
    r = plan.r
    if plan.tail_is_scalar:
        acc = plan.blocks[r][0] * xq
        if r >= 1:
            acc = acc + _block_sum(plan.blocks[r - 1], x_powers)
        start = r - 2
    else:
        acc = _block_sum(plan.blocks[r], x_powers)
        start = r - 1
    for k in range(start, -1, -1):
        acc = mat_mul(xq, acc, counter) + _block_sum(plan.blocks[k], x_powers)
    return acc


def eval_T_tilde(x, t, counter=None):
    """``X T + I``, the exponential approximant, using one product."""
    if x.shape != t.shape or x.shape[0] != x.shape[1]:
        raise ShapeError(f"incompatible shapes {x.shape} and {t.shape}")
    out = mat_mul(x, t, counter)
    out[np.diag_indices_from(out)] += 1
    return out


def taylor_phi(x, m, counter=None):
    """Convenience: form the powers and evaluate ``T_m(X)``."""
    plan = ps_plan(m)
    return eval_T(matrix_powers(x, plan.q, counter), plan, counter)
