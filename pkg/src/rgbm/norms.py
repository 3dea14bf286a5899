"""Structured norms tied to the selection rules, their duals, and exact oracles.

Each candidate-selection rule has a matching norm F such that the
random-then-greedy output magnitude satisfies E|a_jhat| = ||a||_F:

* full deterministic scan      -> infinity norm,
* t random learners            -> ordered l1 norm with the selection-law weights,
* one random group             -> averaged groupwise-infinity norm,
* t random groups              -> ordered mixed norm with the group-law weights.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

WEIGHT_TOL = 1e-9


def _validate_weights(weights):
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 1 or weights.size == 0:
        raise ValueError("weights must be a nonempty 1-D vector")
    if np.any(np.diff(weights) > 0) or weights[-1] < 0:
        raise ValueError("weights must be nonincreasing and nonnegative")
    total = float(np.sum(weights))
    if abs(total - 1.0) > WEIGHT_TOL:
        raise ValueError(
            f"weights must sum to 1 (got {total}); renormalize explicitly if intended"
        )
    return weights


def _validate_groups(groups, dim):
    groups = [np.sort(np.asarray(g, dtype=np.intp)) for g in groups]
    covered = np.concatenate(groups) if groups else np.empty(0, dtype=np.intp)
    if (
        len(covered) != dim
        or len(np.unique(covered)) != dim
        or (len(covered) and (covered.min() < 0 or covered.max() >= dim))
    ):
        raise ValueError(f"groups must partition indices 0..{dim - 1}")
    if any(len(g) == 0 for g in groups):
        raise ValueError("groups must be nonempty")
    return groups


class InfinityNorm:
    """max_j |a_j|; its dual is the l1 norm."""

    def check(self, a):
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("expected a nonempty vector")
        return a

    def value(self, a):
        return float(np.max(np.abs(self.check(a))))

    def dual(self, b):
        return float(np.sum(np.abs(self.check(b))))

    def subgradient(self, a, tie_tol=0.0):
        """Element of the subdifferential; with ``tie_tol`` > 0, weight is
        spread uniformly over near-maximal coordinates (an epsilon-subgradient
        that unsticks descent at kinks)."""
        a = self.check(a)
        mags = np.abs(a)
        tied = mags >= mags.max() - tie_tol
        g = np.zeros_like(a)
        signs = np.sign(a[tied])
        signs[signs == 0] = 1.0
        g[tied] = signs / np.count_nonzero(tied)
        return g

    def dual_maximizer(self, b):
        """A vector a achieving <a, b> = ||a|| * ||b||_dual."""
        b = self.check(b)
        s = np.sign(b)
        s[s == 0] = 1.0
        return s


class OrderedL1Norm:
    """sum_k w_k |a_(k)| with nonincreasing weights w applied to sorted |a|."""

    def __init__(self, weights):
        self.weights = _validate_weights(weights)

    def check(self, a):
        a = np.asarray(a, dtype=np.float64)
        if a.shape != self.weights.shape:
            raise ValueError(
                f"vector has length {a.size}, weights have length {self.weights.size}"
            )
        return a

    def value(self, a):
        mags = np.sort(np.abs(self.check(a)))[::-1]
        return float(np.dot(self.weights, mags))

    def _dual_prefix_ratios(self, b):
        mags = np.sort(np.abs(b))[::-1]
        prefix = np.cumsum(mags)
        weight_prefix = np.cumsum(self.weights)
        valid = weight_prefix > 0  # always true past the first positive weight
        return prefix[valid] / weight_prefix[valid]

    def dual(self, b):
        return float(np.max(self._dual_prefix_ratios(self.check(b))))

    def subgradient(self, a, tie_tol=0.0):
        """Element of the subdifferential; ``tie_tol`` averages the sorted
        weights across blocks of near-equal magnitudes."""
        a = self.check(a)
        mags = np.abs(a)
        order = np.argsort(-mags, kind="stable")
        sorted_mags = mags[order]
        g = np.zeros_like(a)
        block_start = 0
        for k in range(1, order.size + 1):
            if k == order.size or sorted_mags[block_start] - sorted_mags[k] > tie_tol:
                idx = order[block_start:k]
                avg_weight = float(np.mean(self.weights[block_start:k]))
                g[idx] = avg_weight * np.sign(a[idx])
                block_start = k
        return g

    def dual_maximizer(self, b):
        b = self.check(b)
        i = int(np.argmax(self._dual_prefix_ratios(b)))
        order = np.argsort(-np.abs(b), kind="stable")
        a = np.zeros_like(b)
        signs = np.sign(b[order[: i + 1]])
        signs[signs == 0] = 1.0
        a[order[: i + 1]] = signs
        return a


class GroupNorm:
    """(1/G) * sum_g max |a| over group g; its dual is G * max groupwise l1."""

    def __init__(self, groups, dim):
        self.groups = _validate_groups(groups, dim)
        self.dim = dim

    def check(self, a):
        a = np.asarray(a, dtype=np.float64)
        if a.shape != (self.dim,):
            raise ValueError(f"vector has length {a.size}, partition covers {self.dim}")
        return a

    def _group_inf(self, a):
        return np.array([np.max(np.abs(a[g])) for g in self.groups])

    def _group_l1(self, b):
        return np.array([np.sum(np.abs(b[g])) for g in self.groups])

    def value(self, a):
        return float(np.mean(self._group_inf(self.check(a))))

    def dual(self, b):
        return float(len(self.groups) * np.max(self._group_l1(self.check(b))))

    def subgradient(self, a, tie_tol=0.0):
        a = self.check(a)
        g = np.zeros_like(a)
        share = 1.0 / len(self.groups)
        for idx in self.groups:
            mags = np.abs(a[idx])
            tied = idx[mags >= mags.max() - tie_tol]
            signs = np.sign(a[tied])
            signs[signs == 0] = 1.0
            g[tied] = share * signs / tied.size
        return g

    def dual_maximizer(self, b):
        b = self.check(b)
        gi = int(np.argmax(self._group_l1(b)))
        a = np.zeros_like(b)
        idx = self.groups[gi]
        signs = np.sign(b[idx])
        signs[signs == 0] = 1.0
        a[idx] = signs
        return a


class OrderedMixedNorm:
    """Ordered l1 norm applied to the vector of groupwise infinity norms."""

    def __init__(self, groups, weights, dim):
        self.groups = _validate_groups(groups, dim)
        self.weights = _validate_weights(weights)
        if len(self.groups) != self.weights.size:
            raise ValueError("need one weight per group")
        self.dim = dim

    def check(self, a):
        a = np.asarray(a, dtype=np.float64)
        if a.shape != (self.dim,):
            raise ValueError(f"vector has length {a.size}, partition covers {self.dim}")
        return a

    def value(self, a):
        a = self.check(a)
        group_inf = np.sort([np.max(np.abs(a[g])) for g in self.groups])[::-1]
        return float(np.dot(self.weights, group_inf))

    def _dual_prefix_ratios(self, b):
        group_l1 = np.array([np.sum(np.abs(b[g])) for g in self.groups])
        prefix = np.cumsum(np.sort(group_l1)[::-1])
        weight_prefix = np.cumsum(self.weights)
        valid = weight_prefix > 0
        return prefix[valid] / weight_prefix[valid]

    def dual(self, b):
        return float(np.max(self._dual_prefix_ratios(self.check(b))))

    def subgradient(self, a, tie_tol=0.0):
        a = self.check(a)
        group_inf = np.array([np.max(np.abs(a[g])) for g in self.groups])
        order = np.argsort(-group_inf, kind="stable")
        sorted_inf = group_inf[order]
        g = np.zeros_like(a)
        block_start = 0
        for k in range(1, order.size + 1):
            if k == order.size or sorted_inf[block_start] - sorted_inf[k] > tie_tol:
                avg_weight = float(np.mean(self.weights[block_start:k]))
                for gi in order[block_start:k]:
                    idx = self.groups[gi]
                    mags = np.abs(a[idx])
                    tied = idx[mags >= mags.max() - tie_tol]
                    signs = np.sign(a[tied])
                    signs[signs == 0] = 1.0
                    g[tied] = avg_weight * signs / tied.size
                block_start = k
        return g

    def dual_maximizer(self, b):
        b = self.check(b)
        group_l1 = np.array([np.sum(np.abs(b[g])) for g in self.groups])
        order = np.argsort(-group_l1, kind="stable")
        i = int(np.argmax(self._dual_prefix_ratios(b)))
        a = np.zeros_like(b)
        for gi in order[: i + 1]:
            idx = self.groups[gi]
            signs = np.sign(b[idx])
            signs[signs == 0] = 1.0
            a[idx] = signs
        return a


def norm_for_rule(rule, n_learners, groups=None):
    """The norm whose value equals the expected random-then-greedy magnitude."""
    from .sampling import selection_pmf

    if rule.kind == "type0":
        return InfinityNorm()
    if rule.kind == "type1":
        return OrderedL1Norm(selection_pmf(n_learners, rule.size))
    if groups is None:
        raise ValueError(f"{rule.kind} needs a group partition")
    if rule.kind == "type2":
        return GroupNorm(groups, n_learners)
    return OrderedMixedNorm(groups, selection_pmf(len(groups), rule.size), n_learners)


ENUMERATION_LIMIT = 25


def exact_rtg_expectation(values, rule, groups=None):
    """Exact E|a_jhat| for the random-then-greedy pick, by subset enumeration.

    Averages the winning magnitude over every equiprobable candidate set, so
    it is an oracle independent of the norm formulas it is checked against.
    Guarded to 25 learners (or groups) since the subset count is binomial.
    """
    values = np.asarray(values, dtype=np.float64)
    mags = np.abs(values)
    if rule.kind == "type0":
        return float(np.max(mags))
    if rule.kind == "type1":
        n = values.size
        if n > ENUMERATION_LIMIT:
            raise ValueError(
                f"enumeration over C({n}, {rule.size}) subsets is infeasible;"
                " use the selection pmf instead"
            )
        total = 0.0
        for subset in combinations(range(n), rule.size):
            total += np.max(mags[list(subset)])
        return total / comb(n, rule.size)
    if groups is None:
        raise ValueError(f"{rule.kind} needs a group partition")
    group_max = [np.max(mags[np.asarray(g)]) for g in groups]
    if rule.kind == "type2":
        return float(np.mean(group_max))
    n_groups = len(groups)
    if n_groups > ENUMERATION_LIMIT:
        raise ValueError(
            f"enumeration over C({n_groups}, {rule.size}) subsets is infeasible;"
            " use the selection pmf instead"
        )
    total = 0.0
    for subset in combinations(range(n_groups), rule.size):
        total += max(group_max[g] for g in subset)
    return total / comb(n_groups, rule.size)
