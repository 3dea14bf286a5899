"""Scikit-learn style estimators wrapping the randomized boosting trainer."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .boosting import StepRule, predict, train_rgbm
from .datasets import Dataset, feature_quantiles
from .losses import make_loss
from .sampling import SelectionRule
from .stumps import StumpBasis


class _BaseRGBM(BaseEstimator):
    """Shared fit machinery for the stump-boosting estimators.

    Parameters
    ----------
    n_iterations : int
        Boosting rounds.
    selection : str
        Candidate rule: "type0" (full greedy scan), "type1" (random
        learners), "type2" (one random feature group) or "type3" (random
        feature groups).
    t : int or None
        Draw count for type1/type3.
    step : str
        "line_search" or "constant".
    rho : float or None
        Constant-step multiplier; defaults to 1/smoothness when needed.
    loss_param : float or None
        Huber threshold or logistic ridge term, per the loss.
    n_quantiles : int
        Split candidates per feature are quantiles of its distinct values.
    random_state : int
        Seed of the per-fit generator.
    """

    def __init__(
        self,
        n_iterations=100,
        selection="type0",
        t=None,
        step="line_search",
        rho=None,
        loss_param=None,
        n_quantiles=100,
        random_state=0,
    ):
        self.n_iterations = n_iterations
        self.selection = selection
        self.t = t
        self.step = step
        self.rho = rho
        self.loss_param = loss_param
        self.n_quantiles = n_quantiles
        self.random_state = random_state

    _loss_kind = "squared"

    def _make_loss(self):
        return make_loss(self._loss_kind, self.loss_param)

    def _fit_boosting(self, X, y):
        loss = self._make_loss()
        dataset = Dataset.from_arrays(X, y)
        splits = feature_quantiles(dataset, self.n_quantiles)
        basis = StumpBasis(dataset, splits)
        rule = SelectionRule(self.selection, self.t)
        if self.step == "constant":
            rho = self.rho
            if rho is None:
                if loss.smoothness is None:
                    raise ValueError(f"loss {loss.kind!r} has no default constant step")
                rho = 1.0 / loss.smoothness
            step = StepRule.constant(rho)
        elif self.step == "line_search":
            step = StepRule.line_search()
        else:
            raise ValueError(f"unknown step rule {self.step!r}")

        result = train_rgbm(
            dataset, loss, basis, rule, step, self.n_iterations, self.random_state
        )
        self.basis_ = basis
        self.coefficients_ = result.coefficients
        self.train_result_ = result
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coefficients_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features but the model was fit with"
                f" {self.n_features_in_}"
            )
        return predict(self.coefficients_, self.basis_, X)


class RGBMRegressor(_BaseRGBM, RegressorMixin):
    """Stump-boosting regressor with randomized weak-learner selection."""

    def __init__(
        self,
        loss="squared",
        n_iterations=100,
        selection="type0",
        t=None,
        step="line_search",
        rho=None,
        loss_param=None,
        n_quantiles=100,
        random_state=0,
    ):
        super().__init__(
            n_iterations=n_iterations,
            selection=selection,
            t=t,
            step=step,
            rho=rho,
            loss_param=loss_param,
            n_quantiles=n_quantiles,
            random_state=random_state,
        )
        self.loss = loss

    @property
    def _loss_kind(self):
        return self.loss

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        if self.loss not in ("squared", "huber"):
            raise ValueError(f"regression loss must be squared or huber, got {self.loss!r}")
        return self._fit_boosting(X, y)

    def predict(self, X):
        return self.decision_function(X)


class RGBMClassifier(_BaseRGBM, ClassifierMixin):
    """Binary stump-boosting classifier; labels are mapped onto -1/+1 internally."""

    def __init__(
        self,
        loss="logistic",
        n_iterations=100,
        selection="type0",
        t=None,
        step="line_search",
        rho=None,
        loss_param=0.0001,
        n_quantiles=100,
        random_state=0,
    ):
        super().__init__(
            n_iterations=n_iterations,
            selection=selection,
            t=t,
            step=step,
            rho=rho,
            loss_param=loss_param,
            n_quantiles=n_quantiles,
            random_state=random_state,
        )
        self.loss = loss

    @property
    def _loss_kind(self):
        return self.loss

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        if self.loss not in ("logistic", "exponential"):
            raise ValueError(
                f"classification loss must be logistic or exponential, got {self.loss!r}"
            )
        self.classes_ = np.unique(y)
        if self.classes_.size != 2:
            raise ValueError(f"need exactly 2 classes, got {self.classes_.size}")
        signed = np.where(y == self.classes_[1], 1.0, -1.0)
        return self._fit_boosting(X, signed)

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[(scores >= 0).astype(int)]
