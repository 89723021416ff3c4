"""scikit-learn style wrappers over the width model and the source optimisers.

Rows of ``X`` are links given as ``(d_a, d_b)`` accumulated dispersions in s^2.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .analytic import PumpRegime, optimal_pump_fixed_crystal
from .exceptions import DomainError
from .numeric import TAU_P_RANGE, ScalarSearchSpec, full_optimum_2d, minimize_scalar
from .temporal import tau_a_jittered, tau_ah_jittered

_MODES = ("pump", "full")


def _links(X):
    X = check_array(X, dtype=float)
    if X.shape[1] != 2:
        raise DomainError(f"expected 2 columns (d_a, d_b), got {X.shape[1]}")
    return X


class DispersedWidthTransformer(TransformerMixin, BaseEstimator):
    """Map links to ``[tau_A, tau_Ah]`` (jitter-augmented) for a fixed source."""

    def __init__(self, tau_p=1e-9, sigma=1e12, jitter_a=0.0, jitter_b=0.0):
        self.tau_p = tau_p
        self.sigma = sigma
        self.jitter_a = jitter_a
        self.jitter_b = jitter_b

    def fit(self, X, y=None):
        X = _links(X)
        if not (self.tau_p > 0 and self.sigma > 0):
            raise DomainError("tau_p and sigma must be positive")
        if self.jitter_a < 0 or self.jitter_b < 0:
            raise DomainError("jitters must be non-negative")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _links(X)
        d_a, d_b = X[:, 0], X[:, 1]
        return np.column_stack(
            [
                tau_a_jittered(self.tau_p, self.sigma, d_a, self.jitter_a),
                tau_ah_jittered(self.tau_p, self.sigma, d_a, d_b, self.jitter_a, self.jitter_b),
            ]
        )


class SourceOptimizer(BaseEstimator):
    """Predict the source ``[tau_p, sigma]`` minimising the heralded width of each link.

    ``mode="pump"`` keeps ``sigma`` and tunes the pump only; ``mode="full"``
    tunes both.  ``predict`` also stores the attained widths in
    ``widths_`` for the last call.
    """

    def __init__(self, mode="pump", sigma=1e12, jitter_a=0.0, jitter_b=0.0, tau_p_range=TAU_P_RANGE):
        self.mode = mode
        self.sigma = sigma
        self.jitter_a = jitter_a
        self.jitter_b = jitter_b
        self.tau_p_range = tau_p_range

    def fit(self, X, y=None):
        X = _links(X)
        if self.mode not in _MODES:
            raise DomainError(f"mode must be one of {_MODES}, got {self.mode!r}")
        self.n_features_in_ = X.shape[1]
        return self

    def _one(self, d_a, d_b):
        ja, jb = self.jitter_a, self.jitter_b
        if self.mode == "full":
            opt = full_optimum_2d(d_a, d_b, jitter_a=ja, jitter_b=jb, tau_p_range=self.tau_p_range)
            return opt.tau_p, opt.sigma, opt.tau_ah
        if d_a < 0 and d_b < 0 and ja == 0 and jb == 0:
            opt = optimal_pump_fixed_crystal(d_a, d_b, self.sigma)
            if opt.kind is PumpRegime.INTERIOR_MINIMUM:
                return opt.tau_p_star, self.sigma, opt.tau_ah_at_optimum
        res = minimize_scalar(
            lambda tp: float(tau_ah_jittered(tp, self.sigma, d_a, d_b, ja, jb)),
            ScalarSearchSpec(*self.tau_p_range),
        )
        return res.x, self.sigma, res.f

    def predict(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _links(X)
        out = np.array([self._one(float(a), float(b)) for a, b in X])
        self.widths_ = out[:, 2]
        return out[:, :2]
