"""phi(A) for dense A by scaling and modified squaring.

With ``X = 2^-s A`` the doubling identity ``phi(2X) = phi(X)(e^X + I)/2``
gives ``phi(A) = 2^-s phi(X) (e^X + I)(e^{2X} + I)...(e^{2^(s-1) X} + I)``.
``phi(X)`` and ``e^X`` are replaced by ``T_m(X)`` and ``X T_m(X) + I``.
"""
from ._validation import check_square
from .exceptions import ParameterError, ShapeError
from .matrix import OpCounter, identity_like, mat_mul
from .params import select_costmin, select_sequential
from .taylor import eval_T, eval_T_tilde, ps_plan
from .theta import default_theta_table

STRATEGIES = ("sequential", "costmin")


def modified_squaring(t, t_tilde, s, counter=None):
    """Run the coupled squaring recurrence for ``s >= 1`` steps.

    Starting from ``Y = T~ + I`` it repeats ``T~ <- T~^2``,
    ``Y <- Y (T~ + I) / 2`` ``s - 1`` times and finishes with
    ``Y <- T Y / 2``. Uses ``2s - 1`` products; together with the one
    product that formed ``T~`` the squaring phase costs ``2s``.
    """
    if t.shape != t_tilde.shape:
        raise ShapeError(f"shape mismatch {t.shape} vs {t_tilde.shape}")
    if s < 1:
        raise ParameterError("modified squaring needs s >= 1; use T directly when s = 0")
    eye = identity_like(t_tilde)
    y = t_tilde + eye
    for _ in range(s - 1):
        t_tilde = mat_mul(t_tilde, t_tilde, counter)
        y = 0.5 * mat_mul(y, t_tilde + eye, counter)
    return 0.5 * mat_mul(t, y, counter)


def phi_dense(a, strategy="costmin", counter=None, theta=None, params=None):
    """Compute ``phi(A) = sum_k A^k / (k+1)!`` for a dense square matrix.

    Parameters
    ----------
    a : array_like
        Square real or complex matrix with finite entries.
    strategy : {"costmin", "sequential"}
        Parameter selector. ``"sequential"`` forms exact powers and stops at
        the first sufficient degree; ``"costmin"`` estimates norms of powers
        and minimizes the product count.
    counter : OpCounter, optional
        Accumulates the matrix products (and norm-estimation matvecs).
    theta : ThetaTable, optional
        Defaults to the shipped ``tol = 2^-53`` table.
    params : PhiParams, optional
        Precomputed selection (must carry ``powers``); skips selection.

    Returns
    -------
    ndarray
        Approximation of ``phi(A)`` whose backward error is bounded by
        ``2^-53 ||A||`` in exact arithmetic. Total products equal
        ``pi_m + 2s`` for the selected ``(m, s)``.
    """
    a = check_square(a, accept_sparse=False)
    if strategy not in STRATEGIES:
        raise ParameterError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    counter = counter if counter is not None else OpCounter()
    theta = theta or default_theta_table()
    if params is None:
        select = select_sequential if strategy == "sequential" else select_costmin
        params = select(a, theta=theta, counter=counter)
    plan = ps_plan(params.m)
    x_powers = [identity_like(a)] + list(params.powers[:plan.q])
    t = eval_T(x_powers, plan, counter)
    if params.s == 0:
        return t
    t_tilde = eval_T_tilde(x_powers[1], t, counter)
    return modified_squaring(t, t_tilde, params.s, counter)
