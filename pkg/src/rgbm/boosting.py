"""Training loops in prediction space and coefficient space, plus model IO.

``train_rgbm`` runs boosting in prediction space: at each iteration it fits
the pseudo-residual with the best weak-learner from a randomly drawn candidate
set and adds it to the ensemble. ``train_rtgcd`` runs the same procedure as
coordinate descent on the coefficient vector, where the gradient coordinate is
``grad_j = -<B_j, residual>``. With a shared seed the two produce identical
iterates, which the test suite checks exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .datasets import Dataset
from .losses import ExponentialLoss, SquaredLoss, line_search, objective, pseudo_residual
from .sampling import sample_candidates
from .stumps import StumpBasis

GENERATOR_ID = "numpy-pcg64"


@dataclass(frozen=True)
class StepRule:
    """Step-size rule: exact 1-D line search, or a constant multiplier.

    With ``kind="constant"`` the applied step is ``rho * <B_j, residual>``;
    the recommended multiplier is ``1 / smoothness``, which both step rules'
    descent guarantees are stated for.
    """

    kind: str
    rho: float | None = None

    def __post_init__(self):
        if self.kind not in ("line_search", "constant"):
            raise ValueError(f"unknown step rule {self.kind!r}")
        if self.kind == "constant" and (self.rho is None or self.rho <= 0):
            raise ValueError("constant step rule needs rho > 0")

    @classmethod
    def line_search(cls):
        return cls("line_search")

    @classmethod
    def constant(cls, rho):
        return cls("constant", rho)


class IterationRecord(NamedTuple):
    iteration: int
    elapsed_sec: float
    learner: int
    step_size: float
    train_objective: float
    test_objective: float | None


@dataclass
class TrainResult:
    """A trained ensemble plus its per-iteration trace.

    ``coefficients`` maps learner index to accumulated weight (re-selected
    learners add up, so the support stays at most the iteration count).
    """

    coefficients: dict[int, float]
    trace: list[IterationRecord]
    generator_id: str
    seed: int
    loss_kind: str
    capped_iterations: list[int] = field(default_factory=list)

    def train_objectives(self):
        return np.array([rec.train_objective for rec in self.trace])

    def test_objectives(self):
        return np.array(
            [np.nan if rec.test_objective is None else rec.test_objective for rec in self.trace]
        )

    def chosen_learners(self):
        return [rec.learner for rec in self.trace]

    def step_sizes(self):
        return [rec.step_size for rec in self.trace]


def _as_labels(train):
    if isinstance(train, Dataset):
        return train.labels
    return np.asarray(train, dtype=np.float64)


def _scan(basis, candidates, v):
    if candidates.space == "groups":
        return basis.best_in_groups(candidates.indices, v)
    if candidates.indices.size == basis.n_learners:
        return basis.best_overall(v)
    return basis.best_in_learner_subset(candidates.indices, v)


def _validate_run(loss, step, rule, basis, iterations):
    if iterations < 0:
        raise ValueError(f"iteration count must be >= 0, got {iterations}")
    if step.kind == "constant":
        if loss.smoothness is None:
            raise ValueError(
                f"constant step rule needs a smooth loss; {loss.kind} has no"
                " smoothness constant (use line search)"
            )
    rule.validate(basis.n_learners, basis.n_groups)


def _test_state(test, basis):
    if test is None:
        return None
    if not isinstance(basis, StumpBasis):
        raise ValueError("test-set tracing is only supported for stump bases")
    columns = {g: test.feature_values(g) for g in range(test.n_features)}
    return {
        "labels": test.labels,
        "predictions": np.zeros(test.n_samples),
        "columns": columns,
    }


def _update_test(state, basis, j, step_size):
    feature, threshold = basis.learner_params(j)
    mask = state["columns"][feature] <= threshold
    delta = step_size * basis.norm_factor
    state["predictions"][mask] += delta
    state["predictions"][~mask] -= delta


def _run(train, loss, basis, rule, step, iterations, seed, test, coefficient_space):
    labels = _as_labels(train)
    if labels.shape[0] != basis.n_samples:
        raise ValueError(
            f"basis was built for {basis.n_samples} samples but got {labels.shape[0]} labels"
        )
    _validate_run(loss, step, rule, basis, iterations)
    if isinstance(loss, ExponentialLoss) and step.kind == "constant":
        raise ValueError("exponential loss requires the line-search step rule")

    rng = np.random.default_rng(seed)
    predictions = np.zeros(basis.n_samples)
    coefficients: dict[int, float] = {}
    test_state = _test_state(test, basis)
    trace = []
    capped = []
    start = time.perf_counter()

    for m in range(iterations):
        residual = pseudo_residual(loss, labels, predictions)
        candidates = sample_candidates(rule, basis.n_learners, basis.n_groups, rng)
        best = _scan(basis, candidates, residual)

        if coefficient_space:
            gradient = -best.score
        if step.kind == "constant":
            if coefficient_space:
                step_size = -step.rho * gradient
            else:
                step_size = step.rho * best.score
        elif isinstance(loss, SquaredLoss):
            # Closed-form line search equals the scan's inner product; reuse it
            # so both training loops share one float path.
            step_size = best.score
        else:
            result = line_search(loss, labels, predictions, basis.column(best.index))
            step_size = result.step
            if result.capped:
                capped.append(m)

        coefficients[best.index] = coefficients.get(best.index, 0.0) + step_size
        basis.apply_update(predictions, best.index, step_size)
        if test_state is not None:
            _update_test(test_state, basis, best.index, step_size)

        train_obj = objective(loss, labels, predictions)
        test_obj = (
            objective(loss, test_state["labels"], test_state["predictions"])
            if test_state is not None
            else None
        )
        trace.append(
            IterationRecord(
                iteration=m + 1,
                elapsed_sec=time.perf_counter() - start,
                learner=best.index,
                step_size=step_size,
                train_objective=train_obj,
                test_objective=test_obj,
            )
        )

    return TrainResult(
        coefficients=coefficients,
        trace=trace,
        generator_id=GENERATOR_ID,
        seed=seed,
        loss_kind=loss.kind,
        capped_iterations=capped,
    )


def train_rgbm(train, loss, basis, rule, step, iterations, seed, test=None):
    """Randomized gradient boosting in prediction space.

    Parameters
    ----------
    train : Dataset or array of labels
        Training targets; features enter only through ``basis``.
    loss : Loss
        Scalar loss with derivatives.
    basis : StumpBasis or DenseBasis
        The weak-learner design (built from the training data).
    rule : SelectionRule
        Candidate-set rule for each iteration.
    step : StepRule
        Line search, or constant multiplier on the residual inner product.
    iterations : int
        Number of boosting rounds.
    seed : int
        Seed of the per-run PCG64 generator; identical seeds reproduce the
        trace exactly (except wall-clock columns).
    test : Dataset, optional
        Held-out samples traced alongside training (stump bases only).
    """
    return _run(train, loss, basis, rule, step, iterations, seed, test, coefficient_space=False)


def train_rtgcd(train, loss, basis, rule, step, iterations, seed, test=None):
    """Random-then-greedy coordinate descent on the coefficient vector.

    Same signature as :func:`train_rgbm`. The greedy pick maximizes the
    gradient magnitude ``|grad_j| = |<B_j, residual>|`` over the sampled set
    and the constant step is ``-rho * grad_j``; with matching seeds the
    iterates coincide with the prediction-space loop exactly.
    """
    return _run(train, loss, basis, rule, step, iterations, seed, test, coefficient_space=True)


def predict(coefficients, basis, X):
    """Ensemble prediction for raw feature rows.

    ``X`` may be a single feature vector or a matrix with one row per sample;
    stumps evaluate as +-norm_factor around their threshold, exactly as during
    training.
    """
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    out = np.zeros(X.shape[0])
    for j in sorted(coefficients):
        feature, threshold = basis.learner_params(j)
        sign = np.where(X[:, feature] <= threshold, 1.0, -1.0)
        out += coefficients[j] * basis.norm_factor * sign
    return float(out[0]) if single else out


def rate_bound(strong_convexity, smoothness, theta, iterations, initial_gap):
    """Linear-rate bound on the expected optimality gap after ``iterations`` rounds.

    ``(1 - (strong_convexity / smoothness) * theta^2) ** iterations * initial_gap``
    where theta is the minimal cosine angle of the design under the selection
    rule's norm.
    """
    if not 0 < strong_convexity <= smoothness:
        raise ValueError("need 0 < strong_convexity <= smoothness")
    if not 0 < theta <= 1:
        raise ValueError("need 0 < theta <= 1")
    factor = 1.0 - (strong_convexity / smoothness) * theta**2
    return factor**iterations * initial_gap


MODEL_FORMAT = "rgbm-model v1"


def save_model(path, coefficients, basis, loss_kind):
    """Write the ensemble as text: a header line, then one stump per line.

    Header: ``rgbm-model v1 <norm_factor> <loss-kind>``; records are
    ``feature_index<TAB>threshold<TAB>coefficient`` with 0-based features.
    Prediction needs only this file and raw feature vectors.
    """
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{MODEL_FORMAT} {basis.norm_factor!r} {loss_kind}\n")
        for j in sorted(coefficients):
            feature, threshold = basis.learner_params(j)
            fh.write(f"{feature}\t{threshold!r}\t{coefficients[j]!r}\n")


class StumpModel(NamedTuple):
    """A loaded ensemble: enough to predict from raw features."""

    norm_factor: float
    loss_kind: str
    stumps: list  # (feature, threshold, coefficient) triples

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        out = np.zeros(X.shape[0])
        for feature, threshold, coef in self.stumps:
            sign = np.where(X[:, feature] <= threshold, 1.0, -1.0)
            out += coef * self.norm_factor * sign
        return float(out[0]) if single else out


def load_model(path):
    """Read a model file written by :func:`save_model`."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if header[:2] != ["rgbm-model", "v1"]:
            raise ValueError(f"{path}: not a rgbm-model v1 file")
        norm_factor = float(header[2])
        loss_kind = header[3]
        stumps = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            feature, threshold, coef = line.split("\t")
            stumps.append((int(feature), float(threshold), float(coef)))
    return StumpModel(norm_factor=norm_factor, loss_kind=loss_kind, stumps=stumps)
