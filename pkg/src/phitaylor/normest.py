"""Block 1-norm estimation of matrix powers.

Estimates ``||A^p||_1`` using only products with ``A`` and ``A^H``, never
forming ``A^p``. This is the block power method of Higham and Tisseur
(SIAM J. Matrix Anal. Appl. 21, 2000), specialised to a power of a single
operator.
"""
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int, check_square
from .matrix import SparseMatrix, matvec, rmatvec

DEFAULT_BLOCK_WIDTH = 2
DEFAULT_MAX_ITER = 5
DEFAULT_SEED = 1


@dataclass(frozen=True)
class NormEstimate:
    """Attained lower bound on ``||A^p||_1``."""

    value: float
    iterations: int
    products_used: int


def _sign(y):
    if np.iscomplexobj(y):
        mag = np.abs(y)
        out = np.ones_like(y)
        nz = mag > 0
        out[nz] = y[nz] / mag[nz]
        return out
    return np.where(y >= 0, 1.0, -1.0)


def _parallel_columns(s, ref):
    """Mask of columns of ``s`` parallel to some column of ``ref`` (+-1 data)."""
    if ref is None or ref.size == 0:
        return np.zeros(s.shape[1], dtype=bool)
    n = s.shape[0]
    return np.any(np.abs(s.T @ ref) == n, axis=1)


def _resample(s, s_old, rng, max_tries=100):
    # replace columns parallel to an earlier column of s or to one of s_old
    n, t = s.shape
    for j in range(t):
        for _ in range(max_tries):
            earlier = s[:, :j]
            col = s[:, j:j + 1]
            if not (_parallel_columns(col, earlier)[0]
                    or _parallel_columns(col, s_old)[0]):
                break
            s[:, j] = rng.choice([-1.0, 1.0], size=n)
    return s


def normest_power(a, p, block_width=DEFAULT_BLOCK_WIDTH,
                  max_iter=DEFAULT_MAX_ITER, seed=DEFAULT_SEED, counter=None):
    """Estimate ``||A^p||_1`` with a block 1-norm power iteration.

    Parameters
    ----------
    a : ndarray or SparseMatrix
        Square operator.
    p : int
        Power, at least 1.
    block_width : int
        Number of simultaneous probe vectors.
    max_iter : int
        Maximum number of sweeps. A sweep applies ``A^p`` and ``(A^p)^H``
        to the probe block, costing ``2 * p * block_width`` matvecs.
    seed : int
        Seed for the random columns of the starting block.
    counter : OpCounter, optional
        Receives the matvecs and one ``norm_est_count`` increment.

    Returns
    -------
    NormEstimate
        ``value`` is ``||A^p x||_1`` for some unit-1-norm ``x``, hence never
        exceeds the true norm. When ``n <= block_width`` the identity is
        used as the probe block and the value is exact.
    """
    a = check_square(a)
    p = check_positive_int(p, "p")
    t = check_positive_int(block_width, "block_width")
    max_iter = check_positive_int(max_iter, "max_iter")
    n = a.shape[0]
    if counter is not None:
        counter.norm_est_count += 1
    if n == 0:
        return NormEstimate(0.0, 0, 0)

    used = 0

    def forward(x):
        nonlocal used
        for _ in range(p):
            x = matvec(a, x, counter)
        used += p * x.shape[1]
        return x

    def adjoint(x):
        nonlocal used
        for _ in range(p):
            x = rmatvec(a, x, counter)
        used += p * x.shape[1]
        return x

    if n <= t:
        y = forward(np.eye(n, dtype=a.dtype))
        return NormEstimate(float(np.max(np.abs(y).sum(axis=0))), 1, used)

    is_complex = np.iscomplexobj(
        a.data if isinstance(a, SparseMatrix) else a)
    rng = np.random.default_rng(seed)
    x = np.ones((n, t))
    if t > 1:
        x[:, 1:] = rng.choice([-1.0, 1.0], size=(n, t - 1))
        x = _resample(x, None, rng)
    x /= n

    est_old = 0.0
    s_old = None
    ind = None
    ind_best = None
    ind_hist = set()
    k = 0
    for k in range(1, max_iter + 1):
        y = forward(x)
        col_norms = np.abs(y).sum(axis=0)
        j = int(np.argmax(col_norms))
        est = float(col_norms[j])
        if k >= 2 and (est > est_old or k == 2):
            ind_best = int(ind[j])
        if k >= 2 and est <= est_old:
            est = est_old
            break
        est_old = est
        s = _sign(y)
        if not is_complex:
            if k > 1 and np.all(_parallel_columns(s, s_old)):
                break
            if t > 1:
                s = _resample(s, s_old, rng)
        s_old = s
        z = adjoint(s)
        h = np.max(np.abs(z), axis=1)
        if k >= 2 and np.max(h) == h[ind_best]:
            break
        order = np.argsort(-h, kind="stable")
        if t > 1:
            if set(order[:t].tolist()) <= ind_hist:
                break
            fresh = [i for i in order if i not in ind_hist]
            seen = [i for i in order if i in ind_hist]
            order = np.array(fresh + seen)
        ind = order[:t]
        x = np.zeros((n, t))
        x[ind, np.arange(t)] = 1.0
        ind_hist.update(int(i) for i in ind)
    return NormEstimate(est_old, k, used)
