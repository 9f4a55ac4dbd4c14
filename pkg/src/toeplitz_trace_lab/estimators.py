"""A scikit-learn style front end to the log-log rate fit.

:class:`PowerLawRate` is a regressor on ``X = n`` (one column) and
``y = E_n``; it exposes the fitted exponent so it can sit inside a
``Pipeline`` or be cloned and re-fitted like any other estimator.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .rates import fit_loglog_slope


class PowerLawRate(RegressorMixin, BaseEstimator):
    """Fit ``E_n ~ C n**slope`` by least squares in log-log coordinates.

    Parameters
    ----------
    bound : float or None
        If given, :meth:`passes` compares the fitted slope with it.

    Attributes
    ----------
    slope_ : float
    intercept_ : float
        Natural log of ``C``.
    r_squared_ : float
    n_dropped_ : int
        Samples with nonpositive error left out of the fit.
    """

    def __init__(self, bound=None):
        self.bound = bound

    def fit(self, X, y):
        X, y = validate_data(self, X, y, reset=True)
        if X.shape[1] != 1:
            raise ValueError("X must have a single column of sizes n")
        fit = fit_loglog_slope(zip(X[:, 0], y))
        self.slope_ = fit.slope
        self.intercept_ = fit.intercept
        self.r_squared_ = fit.r_squared
        self.n_dropped_ = fit.dropped
        return self

    def predict(self, X):
        check_is_fitted(self, "slope_")
        X = validate_data(self, X, reset=False)
        return np.exp(self.intercept_) * X[:, 0] ** self.slope_

    def passes(self):
        """Whether the fitted slope is at most ``bound``."""
        check_is_fitted(self, "slope_")
        if self.bound is None:
            raise ValueError("no bound configured")
        return bool(self.slope_ <= self.bound)
