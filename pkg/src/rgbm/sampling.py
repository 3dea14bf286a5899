"""Candidate-set selection rules and the random-then-greedy probability law.

The four rules pick the candidate set J scanned at each boosting iteration:

* ``type0`` - every learner (deterministic greedy),
* ``type1`` - ``size`` learners uniformly without replacement,
* ``type2`` - one uniformly chosen group,
* ``type3`` - ``size`` uniformly chosen groups without replacement.

``type2`` is exactly ``type3`` with size 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from fractions import Fraction
from math import comb
from typing import NamedTuple

import numpy as np

RULE_KINDS = ("type0", "type1", "type2", "type3")


@dataclass(frozen=True)
class SelectionRule:
    """Which candidate-selection rule to use; ``size`` is the draw count t."""

    kind: str
    size: int | None = None

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ValueError(f"unknown selection rule {self.kind!r}")
        if self.kind in ("type1", "type3"):
            if self.size is None or self.size < 1:
                raise ValueError(f"{self.kind} needs a draw count of at least 1")
        elif self.size is not None:
            raise ValueError(f"{self.kind} takes no draw count")

    def validate(self, n_learners, n_groups):
        if self.kind == "type1" and self.size > n_learners:
            raise ValueError(
                f"type1 draw count {self.size} exceeds the {n_learners} learners"
            )
        if self.kind == "type3" and self.size > n_groups:
            raise ValueError(
                f"type3 draw count {self.size} exceeds the {n_groups} groups"
            )


class Candidates(NamedTuple):
    """A sampled candidate set: indices into learner or group space."""

    space: str  # "learners" or "groups"
    indices: np.ndarray


def sample_candidates(rule, n_learners, n_groups, rng):
    """Draw the candidate set J for one iteration (sorted ascending)."""
    rule.validate(n_learners, n_groups)
    if rule.kind == "type0":
        return Candidates("learners", np.arange(n_learners))
    if rule.kind == "type1":
        picked = rng.choice(n_learners, size=rule.size, replace=False)
        return Candidates("learners", np.sort(picked))
    # type2 is exactly type3 with a single draw; sharing the draw mechanism
    # makes the equivalence hold sequence-for-sequence, not just in law
    size = 1 if rule.kind == "type2" else rule.size
    picked = rng.choice(n_groups, size=size, replace=False)
    return Candidates("groups", np.sort(picked))


def selection_pmf(n, size):
    """Probability that the rank-j magnitude wins a random-then-greedy draw.

    Drawing ``size`` of ``n`` items uniformly without replacement and keeping
    the largest magnitude returns the j-th largest (1-based rank j) with
    probability ``C(n-j, size-1) / C(n, size)``. Computed by the ratio
    recurrence, so it is stable for n up to 10^6.
    """
    if not 1 <= size <= n:
        raise ValueError(f"need 1 <= size <= n, got size={size}, n={n}")
    ranks = np.arange(1, n, dtype=np.float64)
    ratios = (n - ranks - size + 1) / (n - ranks)
    pmf = np.empty(n)
    pmf[0] = size / n
    if n > 1:
        pmf[1:] = pmf[0] * np.cumprod(ratios)
    return pmf


def selection_pmf_exact(n, size):
    """The same law as exact fractions (enumeration-friendly oracle form)."""
    total = comb(n, size)
    return [Fraction(comb(n - j, size - 1), total) for j in range(1, n + 1)]


def enumerate_selection_pmf(n, size):
    """Rank-win probabilities by brute-force enumeration of all C(n, size) subsets.

    Exact rational arithmetic; the winner of a subset is its smallest element
    (item k holds the k-th largest magnitude).
    """
    wins = [0] * n
    count = 0
    for subset in combinations(range(n), size):
        wins[min(subset)] += 1
        count += 1
    return [Fraction(w, count) for w in wins]


def rtg_pick(values, rule, rng, groups=None):
    """Random-then-greedy: sample J by ``rule``, return argmax |values| over J.

    Returns ``(index, magnitude)``; ties go to the smallest index. ``groups``
    (a list of index arrays partitioning the entries) is required for the
    group rules.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("values must be nonempty")
    if rule.kind in ("type2", "type3") and groups is None:
        raise ValueError(f"{rule.kind} needs a group partition")

    n_groups = len(groups) if groups is not None else 0
    cand = sample_candidates(rule, values.size, n_groups, rng)
    if cand.space == "learners":
        indices = cand.indices
    else:
        indices = np.sort(np.concatenate([groups[g] for g in cand.indices]))
    k = int(np.argmax(np.abs(values[indices])))
    j = int(indices[k])
    return j, float(abs(values[j]))


def beta_limit_pdf(q, size):
    """Large-n limit of the scaled selection law: ``size * (1 - q)^(size - 1)``.

    This is the Beta(1, size) density: n times the win probability of the
    rank at quantile q converges to it as n grows with q fixed.
    """
    q = np.asarray(q, dtype=np.float64)
    if np.any(q <= 0) or np.any(q >= 1):
        raise ValueError("quantile must lie strictly inside (0, 1)")
    result = size * (1.0 - q) ** (size - 1)
    return float(result) if result.ndim == 0 else result
