"""phi(A)b without forming phi(A), using matrix-vector products only.

With ``Y = A/s``, ``phi(A) = (1/s) phi(Y) (e^{(s-1)Y} + ... + e^Y + I)``.
Setting ``b_1 = T_m(Y) b`` and ``b_{i+1} = T~_m(Y) b_i`` gives
``phi(A) b ~ (b_1 + ... + b_s) / s`` at ``s(m+1) - 1`` matvecs per column.
"""
import numpy as np

from ._validation import check_block, check_square
from .exceptions import ParameterError
from .matrix import OpCounter, SparseMatrix, matvec
from .params import select_action
from .theta import DEFAULT_M_MAX, default_theta_table

VARIANTS = ("phi", "exp")


def apply_T(a, v, m, scale, variant="phi", counter=None, early_stop=False):
    """Apply a truncated Taylor polynomial of ``scale * A`` to ``v``.

    ``variant="phi"`` applies ``T_m(Y) = sum_{k<=m} Y^k/(k+1)!`` with ``m``
    matvecs; ``variant="exp"`` applies ``sum_{k<=m+1} Y^k/k!`` with
    ``m + 1``. Terms are built incrementally as ``w_k = Y w_{k-1} / c_k``.

    ``early_stop`` truncates once two consecutive terms are negligible
    relative to the partial sum; it breaks the fixed matvec count and is off
    by default.
    """
    if variant not in VARIANTS:
        raise ParameterError(f"variant must be one of {VARIANTS}")
    degree, shift = (m, 1) if variant == "phi" else (m + 1, 0)
    w = v
    acc = v.copy()
    prev_norm = np.inf
    for k in range(1, degree + 1):
        w = matvec(a, w, counter) * (scale / (k + shift))
        acc = acc + w
        if early_stop:
            w_norm = np.max(np.abs(w))
            if w_norm + prev_norm <= 2.0 ** -53 * np.max(np.abs(acc)):
                break
            prev_norm = w_norm
    return acc


def phi_action(a, b, theta=None, counter=None, m_max=DEFAULT_M_MAX, params=None,
               early_stop=False):
    """Compute ``phi(A) b`` for dense or sparse ``A``.

    Parameters
    ----------
    a : ndarray or SparseMatrix
        Square operator; scipy sparse matrices are accepted and converted.
    b : array_like
        Vector of length ``N`` or an ``N x n0`` block.
    theta : ThetaTable, optional
    counter : OpCounter, optional
        Receives ``s(m+1) - 1`` matvecs per column plus selection matvecs.
    m_max : int
        Largest Taylor degree considered by the selector.
    params : PhiParams, optional
        Reuse a previous :func:`select_action` result.

    Returns
    -------
    ndarray
        Same shape as ``b``.
    """
    a = check_square(a)
    block, was_vector = check_block(b, a.shape[1])
    counter = counter if counter is not None else OpCounter()
    theta = theta or default_theta_table()
    if params is None:
        params = select_action(a, theta=theta, m_max=m_max, counter=counter)
    m, s = params.m, params.s
    scale = 1.0 / s
    b_i = apply_T(a, block, m, scale, "phi", counter, early_stop)
    f = b_i.copy()
    for _ in range(s - 1):
        b_i = apply_T(a, b_i, m, scale, "exp", counter, early_stop)
        f += b_i
    f /= s
    return f[:, 0] if was_vector else f


def _scaled(a, t):
    if isinstance(a, SparseMatrix):
        return a.scaled(t)
    return t * a


def phi_combo(a, t, b0, b1, theta=None, counter=None, m_max=DEFAULT_M_MAX,
              params=None):
    """``exp(tA) b0 + t phi(tA) b1`` via a single action.

    Uses ``exp(tA) b0 = b0 + t phi(tA) A b0``, so the result is
    ``b0 + t phi(tA)(A b0 + b1)``: one matvec more than :func:`phi_action`.
    ``params``, if given, must have been selected for ``tA``.
    """
    a = check_square(a)
    v0, was_vector = check_block(b0, a.shape[1], "b0")
    v1, _ = check_block(b1, a.shape[1], "b1")
    if v0.shape != v1.shape:
        raise ParameterError(f"b0 and b1 shapes differ: {v0.shape} vs {v1.shape}")
    counter = counter if counter is not None else OpCounter()
    rhs = matvec(a, v0, counter) + v1
    out = v0 + t * phi_action(_scaled(a, t), rhs, theta=theta, counter=counter,
                              m_max=m_max, params=params)
    return out[:, 0] if was_vector else out
