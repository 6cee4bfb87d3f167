"""Selection of the Taylor degree ``m`` and the scaling ``s``.

Dense evaluation scales by ``2^-s`` and picks ``m`` from
:data:`DENSE_DEGREES`; the action path scales by ``1/s`` and may use any
``1 <= m <= m_max``. Both are driven by

    alpha_p(A) = max(||A^p||^(1/p), ||A^(p+1)||^(1/(p+1)))

which bounds the backward error whenever ``p(p-1) <= m + 2``.
"""
import math
from dataclasses import dataclass, field

from ._validation import check_positive_int, check_square
from .exceptions import ParameterError, ScalingOverflowError
from .matrix import mat_mul, one_norm
from .normest import normest_power
from .taylor import ps_cost
from .theta import DEFAULT_M_MAX, default_theta_table

DENSE_DEGREES = (2, 4, 6, 9, 12, 16, 20, 25)
MAX_SCALING = 60
COSTMIN_P_MAX = 5

# eta index used by the cost-minimizing selector for each dense degree
_ETA_INDEX = {2: 2, 4: 3, 6: 3, 9: 3, 12: 4, 16: 4, 20: 5, 25: 5}


@dataclass
class PhiParams:
    """Selected degree and scaling together with the evidence behind them.

    ``s`` is an exponent (scale by ``2^-s``) on the dense path and a divisor
    (scale by ``1/s``) on the action path. ``powers`` holds the scaled
    powers ``[X, X^2, ..., X^q]`` when the selector computed them.
    ``evidence`` maps ``"d"``, ``"alpha"`` and ``"eta"`` to ``{p: value}``.
    """

    m: int
    s: int
    cost: int
    strategy: str
    p: int | None = None
    powers: list | None = field(default=None, repr=False)
    evidence: dict = field(default_factory=lambda: {"d": {}, "alpha": {}, "eta": {}})

    def evidence_lists(self):
        """Evidence as sorted ``[p, value]`` pairs (JSON friendly)."""
        return {key: [[int(p), float(v)] for p, v in sorted(vals.items())]
                for key, vals in self.evidence.items()}


def alpha_p(norm_roots):
    """``alpha_p = max(d_p, d_{p+1})`` for every ``p`` with both roots known."""
    if not norm_roots:
        raise ParameterError("no norm roots supplied")
    out = {}
    for p in sorted(norm_roots):
        if p + 1 in norm_roots:
            out[p] = max(norm_roots[p], norm_roots[p + 1])
    if not out:
        raise ParameterError("alpha_p needs d_p and d_{p+1} for some p")
    return out


def scaling_exponent(eta, theta):
    """Smallest ``s >= 0`` with ``2^-s * eta <= theta``."""
    if eta <= theta:
        return 0
    s = max(math.ceil(math.log2(eta / theta)), 0)
    while math.ldexp(eta, -s) > theta:
        s += 1
    return s


def scaling_divisor(alpha, theta):
    """Smallest ``s >= 1`` with ``alpha / s <= theta``."""
    s = max(math.ceil(alpha / theta), 1)
    while alpha / s > theta:
        s += 1
    return s


def dense_cost(m, s):
    """Matrix products for dense evaluation: ``pi_m + 2s``."""
    return ps_cost(m) + 2 * s


def action_cost(m, s):
    """Matrix-vector products for the action: ``s(m+1) - 1``."""
    return s * (m + 1) - 1


def action_p_max(m_max):
    """Largest ``p`` with ``p(p-1) <= m_max + 2``."""
    p = 1
    while (p + 1) * p <= m_max + 2:
        p += 1
    return p


def _check_s(s):
    if s > MAX_SCALING:
        raise ScalingOverflowError(
            f"scaling s={s} exceeds the cap {MAX_SCALING}; ||A|| is too large")
    return s


def _root(value, p):
    return value ** (1.0 / p) if value > 0 else 0.0


def _rescale(powers, s):
    if s == 0:
        return powers
    return [math.ldexp(1.0, -i * s) * a_i for i, a_i in enumerate(powers, start=1)]


def select_sequential(a, theta=None, counter=None):
    """Walk ``m`` through :data:`DENSE_DEGREES`, forming powers lazily.

    Norms of powers not yet formed are replaced by products of known norms
    (upper bounds). Returns the first degree whose threshold covers the
    current ``eta``; otherwise ``m = 25`` with the smallest sufficient ``s``.
    """
    a = check_square(a, accept_sparse=False)
    theta = theta or default_theta_table()
    inf = math.inf
    d = {}
    powers = [a, mat_mul(a, a, counter)]
    d[1] = one_norm(powers[0])
    d[2] = one_norm(powers[1])
    d[3] = d[1] * d[2]
    d[4] = inf
    alpha = {1: d[1], 2: max(_root(d[2], 2), _root(d[3], 3))}
    eta = {1: alpha[2]}

    def done(m, p):
        return PhiParams(m=m, s=0, cost=dense_cost(m, 0), strategy="sequential",
                         p=p, powers=powers,
                         evidence={"d": dict(d), "alpha": dict(alpha), "eta": dict(eta)})

    def argmin_alpha(ps):
        return min(ps, key=lambda p: alpha[p])

    if eta[1] <= theta[2]:
        return done(2, 2)
    if eta[1] <= theta[4]:
        return done(4, 2)

    powers.append(mat_mul(powers[0], powers[1], counter))
    d[3] = one_norm(powers[2])
    d[4] = min(d[1] * d[3], d[4])
    alpha[2] = max(_root(d[2], 2), _root(d[3], 3))
    alpha[3] = max(_root(d[3], 3), _root(d[4], 4))
    eta[2] = min(alpha[2], alpha[3])
    if eta[2] <= theta[6]:
        return done(6, argmin_alpha((2, 3)))
    if eta[2] <= theta[9]:
        return done(9, argmin_alpha((2, 3)))

    powers.append(mat_mul(powers[1], powers[1], counter))
    d[4] = one_norm(powers[3])
    d[5] = min(d[1] * d[4], d[2] * d[3])
    alpha[3] = max(_root(d[3], 3), _root(d[4], 4))
    alpha[4] = max(_root(d[4], 4), _root(d[5], 5))
    eta[3] = min(alpha[2], alpha[3], alpha[4])
    if eta[3] <= theta[12]:
        return done(12, argmin_alpha((2, 3, 4)))
    if eta[3] <= theta[16]:
        return done(16, argmin_alpha((2, 3, 4)))

    powers.append(mat_mul(powers[0], powers[3], counter))
    d[5] = one_norm(powers[4])
    d[6] = min(d[1] * d[5], d[2] * d[4], d[3] ** 2)
    alpha[4] = max(_root(d[4], 4), _root(d[5], 5))
    alpha[5] = max(_root(d[5], 5), _root(d[6], 6))
    eta[4] = min(alpha[2], alpha[3], alpha[4], alpha[5])
    p_best = argmin_alpha((2, 3, 4, 5))
    if eta[4] <= theta[20]:
        return done(20, p_best)
    if eta[4] <= theta[25]:
        return done(25, p_best)

    s = _check_s(scaling_exponent(eta[4], theta[25]))
    return PhiParams(m=25, s=s, cost=dense_cost(25, s), strategy="sequential",
                     p=p_best, powers=_rescale(powers, s),
                     evidence={"d": d, "alpha": alpha, "eta": eta})


def costmin_candidates(eta, theta):
    """``{m: (s_m, C_m)}`` over :data:`DENSE_DEGREES` for the given ``eta`` map."""
    out = {}
    for m in DENSE_DEGREES:
        s_m = scaling_exponent(eta[_ETA_INDEX[m]], theta[m])
        q = math.sqrt(m)
        out[m] = (s_m, math.ceil(q) + math.floor(q) - 2 + 2 * s_m)
    return out


def select_costmin(a, theta=None, counter=None, block_width=2, max_iter=5):
    """Pick the dense degree that minimizes ``pi_m + 2 s_m``.

    Norms ``||A^p||_1`` for ``p = 2..6`` come from :func:`normest_power`;
    ties go to the smaller ``m``. Powers up to ``ceil(sqrt m)`` of the chosen
    degree are formed afterwards and rescaled by ``2^-is``.
    """
    a = check_square(a, accept_sparse=False)
    theta = theta or default_theta_table()
    p_max = COSTMIN_P_MAX
    d = {1: one_norm(a)}
    for p in range(2, p_max + 2):
        est = normest_power(a, p, block_width=block_width, max_iter=max_iter,
                            counter=counter)
        d[p] = _root(est.value, p)
    alpha = {1: d[1]}
    for p in range(2, p_max + 1):
        alpha[p] = max(d[p], d[p + 1])
    eta = {1: alpha[2]}
    for p in range(2, p_max + 1):
        eta[p] = min(eta[p - 1], alpha[p])

    candidates = costmin_candidates(eta, theta)
    m = min(DENSE_DEGREES, key=lambda k: (candidates[k][1], k))
    s, cost = candidates[m]
    _check_s(s)
    idx = _ETA_INDEX[m]
    p_best = min(range(2, idx + 1), key=lambda p: alpha[p])

    q = math.isqrt(m - 1) + 1
    powers = [a]
    for _ in range(2, q + 1):
        powers.append(mat_mul(powers[-1], a, counter))
    return PhiParams(m=m, s=s, cost=cost, strategy="costmin", p=p_best,
                     powers=_rescale(powers, s),
                     evidence={"d": d, "alpha": alpha, "eta": eta})


def action_candidates(alpha, theta, m_max, p_max):
    """Yield ``(cost, m, p, s)`` over the admissible ``(m, p)`` grid."""
    for m in range(1, m_max + 1):
        for p in range(2, p_max + 1):
            if p * (p - 1) - 2 > m:
                continue
            s = scaling_divisor(alpha[p], theta[m])
            yield action_cost(m, s), m, p, s


def select_action(a, theta=None, m_max=DEFAULT_M_MAX, counter=None,
                  block_width=2, max_iter=5):
    """Choose ``(m, s)`` for the matrix-free action minimizing matvecs.

    When ``||A||_1`` is small enough that estimating ``alpha_p`` would cost
    more than it could save, ``||A||_1`` is used directly; otherwise
    ``alpha_p`` is estimated for ``2 <= p <= p_max`` and the cost
    ``(m+1) ceil(alpha_p / theta_m) - 1`` is minimized over the grid
    ``p(p-1) - 2 <= m <= m_max`` (smallest ``m`` wins ties).
    """
    a = check_square(a)
    theta = theta or default_theta_table()
    m_max = check_positive_int(m_max, "m_max", minimum=2)
    if m_max > theta.m_max:
        raise ParameterError(f"m_max={m_max} exceeds the theta table ({theta.m_max})")
    p_max = action_p_max(m_max)
    d = {1: one_norm(a)}
    threshold = theta[m_max] * (4 * p_max * (p_max + 3) + 1) / m_max

    if d[1] <= threshold:
        best = None
        for m in range(1, m_max + 1):
            s = scaling_divisor(d[1], theta[m])
            cost = action_cost(m, s)
            if best is None or cost < best[0]:
                best = (cost, m, s)
        cost, m, s = best
        return PhiParams(m=m, s=s, cost=cost, strategy="action", p=1,
                         evidence={"d": d, "alpha": {1: d[1]}, "eta": {}})

    for p in range(2, p_max + 2):
        est = normest_power(a, p, block_width=block_width, max_iter=max_iter,
                            counter=counter)
        d[p] = _root(est.value, p)
    alpha = {1: d[1]}
    for p in range(2, p_max + 1):
        alpha[p] = max(d[p], d[p + 1])
    best = None
    for cand in action_candidates(alpha, theta, m_max, p_max):
        if best is None or cand[0] < best[0]:
            best = cand
    cost, m, p, s = best
    return PhiParams(m=m, s=s, cost=cost, strategy="action", p=p,
                     evidence={"d": d, "alpha": alpha, "eta": {}})


def backward_error_ok(params, theta=None):
    """Check the scaled bound ``alpha_p * scale <= theta_m`` on the evidence."""
    theta = theta or default_theta_table()
    alpha = params.evidence["alpha"][params.p]
    if params.strategy == "action":
        return alpha / params.s <= theta[params.m]
    return math.ldexp(alpha, -params.s) <= theta[params.m]


__all__ = [
    "DENSE_DEGREES", "PhiParams", "alpha_p", "select_sequential",
    "select_costmin", "select_action", "scaling_exponent", "scaling_divisor",
    "dense_cost", "action_cost", "action_p_max", "backward_error_ok",
    "costmin_candidates", "action_candidates",
]
