"""scikit-learn style wrappers.

``fit`` takes the square operator and does the expensive, vector-free work
(parameter selection, and for :class:`PhiTaylor` the full evaluation);
``transform`` applies the fitted ``phi`` to the columns of a block.
"""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_block, check_square
from .action import _scaled, phi_action
from .dense import STRATEGIES, phi_dense
from .exceptions import ParameterError
from .matrix import OpCounter
from .params import select_action, select_costmin, select_sequential
from .theta import DEFAULT_M_MAX


class PhiTaylor(BaseEstimator):
    """Dense ``phi(A)`` by scaling and modified squaring.

    Attributes set by ``fit``: ``phi_``, ``params_``, ``counter_``,
    ``n_features_in_``.
    """

    def __init__(self, strategy="costmin"):
        self.strategy = strategy

    def fit(self, X, y=None):
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.strategy!r}")
        a = check_square(X, accept_sparse=False)
        self.counter_ = OpCounter()
        select = select_sequential if self.strategy == "sequential" else select_costmin
        self.params_ = select(a, counter=self.counter_)
        self.phi_ = phi_dense(a, self.strategy, counter=self.counter_, params=self.params_)
        self.n_features_in_ = a.shape[1]
        return self

    def transform(self, X):
        """``phi(A) @ X`` for a vector or an ``N x k`` block."""
        check_is_fitted(self, "phi_")
        block, was_vector = check_block(X, self.n_features_in_, "X")
        out = self.phi_ @ block
        return out[:, 0] if was_vector else out


class PhiAction(BaseEstimator):
    """Matrix-free ``phi(tA) b`` with parameters chosen once per operator."""

    def __init__(self, t=1.0, m_max=DEFAULT_M_MAX):
        self.t = t
        self.m_max = m_max

    def fit(self, X, y=None):
        a = check_square(X)
        self.operator_ = _scaled(a, self.t)
        self.select_counter_ = OpCounter()
        self.params_ = select_action(self.operator_, m_max=self.m_max,
                                     counter=self.select_counter_)
        self.n_features_in_ = a.shape[1]
        return self

    def transform(self, X):
        """``phi(tA) @ X``; ``counter_`` holds the matvecs of the last call."""
        check_is_fitted(self, "params_")
        block, was_vector = check_block(X, self.n_features_in_, "X")
        self.counter_ = OpCounter()
        out = phi_action(self.operator_, block, counter=self.counter_,
                         params=self.params_)
        return out[:, 0] if was_vector else np.asarray(out)
