"""Scalar losses with derivatives and regularity constants, plus 1-D line search."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.special import expit


class Loss:
    """Base scalar loss ``l(y, f)``, differentiable in the prediction f.

    Attributes
    ----------
    smoothness : float or None
        The smallest constant s with l(y, f1) <= l(y, f2) + l'(y, f2)(f1-f2)
        + (s/2)(f1-f2)^2 for all inputs, or None when no such constant exists.
    strong_convexity : float or None
        The analogous lower-curvature constant, or None.
    """

    kind = "abstract"
    smoothness = None
    strong_convexity = None

    def value(self, y, f):
        raise NotImplementedError

    def derivative(self, y, f):
        raise NotImplementedError

    def second_derivative(self, y, f):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class SquaredLoss(Loss):
    """Least-squares loss 0.5 * (y - f)^2; 1-smooth and 1-strongly convex."""

    kind = "squared"
    smoothness = 1.0
    strong_convexity = 1.0

    def value(self, y, f):
        return 0.5 * np.square(y - f)

    def derivative(self, y, f):
        return np.asarray(f - y, dtype=np.float64)

    def second_derivative(self, y, f):
        return np.ones_like(np.asarray(f, dtype=np.float64))


class HuberLoss(Loss):
    """Huber loss with threshold d: quadratic near the target, linear beyond.

    1-smooth but not strongly convex.
    """

    kind = "huber"

    def __init__(self, d=1.0):
        if d <= 0:
            raise ValueError(f"huber threshold must be positive, got {d}")
        self.d = float(d)
        self.smoothness = 1.0
        self.strong_convexity = None

    def value(self, y, f):
        resid = np.abs(np.asarray(y, dtype=np.float64) - f)
        return np.where(
            resid <= self.d, 0.5 * resid**2, self.d * resid - 0.5 * self.d**2
        )

    def derivative(self, y, f):
        diff = np.asarray(f, dtype=np.float64) - y
        return np.clip(diff, -self.d, self.d)

    def second_derivative(self, y, f):
        diff = np.abs(np.asarray(f, dtype=np.float64) - y)
        return (diff <= self.d).astype(np.float64)

    def __repr__(self):
        return f"HuberLoss(d={self.d})"


class LogisticLoss(Loss):
    """Logistic loss log(1 + exp(-y f)) plus an optional ridge term (d/2) f^2.

    (1/4 + d)-smooth; d-strongly convex when d > 0. Evaluated through
    ``logaddexp`` so large margins do not overflow.
    """

    kind = "logistic"

    def __init__(self, d=0.0):
        if d < 0:
            raise ValueError(f"ridge parameter must be >= 0, got {d}")
        self.d = float(d)
        self.smoothness = 0.25 + self.d
        self.strong_convexity = self.d if self.d > 0 else None

    def value(self, y, f):
        margin = np.asarray(y, dtype=np.float64) * f
        return np.logaddexp(0.0, -margin) + 0.5 * self.d * np.square(f)

    def derivative(self, y, f):
        y = np.asarray(y, dtype=np.float64)
        return -y * expit(-y * f) + self.d * f

    def second_derivative(self, y, f):
        y = np.asarray(y, dtype=np.float64)
        p = expit(-y * f)
        return np.square(y) * p * (1.0 - p) + self.d

    def __repr__(self):
        return f"LogisticLoss(d={self.d})"


class ExponentialLoss(Loss):
    """Exponential loss exp(-y f); neither smooth nor strongly convex.

    Only usable with the line-search step rule, which caps the step when the
    1-D problem is unbounded below (see :func:`line_search`).
    """

    kind = "exponential"

    def value(self, y, f):
        return np.exp(-np.asarray(y, dtype=np.float64) * f)

    def derivative(self, y, f):
        y = np.asarray(y, dtype=np.float64)
        return -y * np.exp(-y * f)

    def second_derivative(self, y, f):
        y = np.asarray(y, dtype=np.float64)
        return np.square(y) * np.exp(-y * f)


def make_loss(kind, d=None):
    """Construct a loss by name; ``d`` is the Huber threshold / logistic ridge."""
    if kind == "squared":
        return SquaredLoss()
    if kind == "huber":
        return HuberLoss(1.0 if d is None else d)
    if kind == "logistic":
        return LogisticLoss(0.0 if d is None else d)
    if kind == "exponential":
        return ExponentialLoss()
    raise ValueError(f"unknown loss kind {kind!r}")


def objective(loss, labels, predictions):
    """Total empirical loss sum_i l(y_i, f_i)."""
    labels = np.asarray(labels, dtype=np.float64)
    predictions = np.asarray(predictions, dtype=np.float64)
    if labels.shape != predictions.shape:
        raise ValueError("labels and predictions must have equal length")
    return float(np.sum(loss.value(labels, predictions)))


def pseudo_residual(loss, labels, predictions):
    """Negative gradient of the empirical loss with respect to the predictions."""
    labels = np.asarray(labels, dtype=np.float64)
    predictions = np.asarray(predictions, dtype=np.float64)
    if labels.shape != predictions.shape:
        raise ValueError("labels and predictions must have equal length")
    return -loss.derivative(labels, predictions)


class LineSearchResult(NamedTuple):
    step: float
    capped: bool


LINE_SEARCH_TOL = 1e-12
LINE_SEARCH_MAX_ITER = 200
LINE_SEARCH_CAP = 50.0


def line_search(loss, labels, predictions, column, cap=LINE_SEARCH_CAP):
    """Minimize rho -> sum_i l(y_i, f_i + rho * c_i) for a unit-norm column c.

    Squared loss has the closed form rho = <residual, column>. Other convex
    losses use a bracketed Newton/bisection hybrid run until the 1-D
    derivative is below 1e-12 in absolute value. When the problem is unbounded
    below (possible for the exponential loss on a separating direction) the
    step is clamped to ``cap`` and flagged.
    """
    labels = np.asarray(labels, dtype=np.float64)
    predictions = np.asarray(predictions, dtype=np.float64)
    column = np.asarray(column, dtype=np.float64)

    if isinstance(loss, SquaredLoss):
        rho = float(np.dot(labels - predictions, column))
        return LineSearchResult(rho, False)

    def dphi(rho):
        return float(np.dot(loss.derivative(labels, predictions + rho * column), column))

    def ddphi(rho):
        return float(
            np.dot(loss.second_derivative(labels, predictions + rho * column), column**2)
        )

    d0 = dphi(0.0)
    if abs(d0) <= LINE_SEARCH_TOL:
        return LineSearchResult(0.0, False)

    # Expand a bracket [lo, hi] with dphi(lo) < 0 < dphi(hi); the derivative is
    # nondecreasing because phi is convex.
    if d0 > 0:
        hi, d_hi = 0.0, d0
        lo, width = -1.0, 1.0
        while dphi(lo) > 0:
            if -lo >= cap:
                return LineSearchResult(-cap, True)
            width *= 2.0
            lo = max(lo - width, -cap)
        d_lo = dphi(lo)
    else:
        lo, d_lo = 0.0, d0
        hi, width = 1.0, 1.0
        while dphi(hi) < 0:
            if hi >= cap:
                return LineSearchResult(cap, True)
            width *= 2.0
            hi = min(hi + width, cap)
        d_hi = dphi(hi)

    rho = lo - d_lo * (hi - lo) / (d_hi - d_lo) if d_hi > d_lo else 0.5 * (lo + hi)
    for _ in range(LINE_SEARCH_MAX_ITER):
        d = dphi(rho)
        if abs(d) <= LINE_SEARCH_TOL:
            return LineSearchResult(rho, False)
        if d > 0:
            hi = rho
        else:
            lo = rho
        curvature = ddphi(rho)
        candidate = rho - d / curvature if curvature > 0 else None
        if candidate is None or not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        rho = candidate
    return LineSearchResult(rho, False)
