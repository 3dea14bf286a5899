"""Implicit normalized design matrices of weak-learners with best-in-set scans.

A stump indexed by (feature g, threshold s) predicts +1 when ``x_g <= s`` and
-1 otherwise; its prediction vector over the n training samples is scaled by
1/sqrt(n) so every column has unit Euclidean norm. Columns are never
materialized during training: inner products against a vector v come from
prefix sums of v in per-feature sorted order,

    <B_j, v> = (2 * sum_{i : x_ig <= s} v_i - sum_i v_i) / sqrt(n),

which costs O(n) per feature group instead of O(n * thresholds).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class CandidateBest(NamedTuple):
    """Winning learner of a scan: ``score`` is the signed inner product."""

    index: int
    score: float


class StumpBasis:
    """All stump weak-learners over a dataset, grouped by feature.

    Parameters
    ----------
    dataset : Dataset
        Training samples; feature columns are read once at construction.
    splits : SplitCandidates
        Per-feature ascending thresholds (the per-feature maximum must not
        appear, so both stump halves are always nonempty).

    Only one sign per (feature, threshold) is enrolled; the scans maximize the
    absolute inner product and the signed step size recovers the mirrored
    learner, so the trained model is unchanged.
    """

    def __init__(self, dataset, splits):
        if splits.n_features != dataset.n_features:
            raise ValueError("split candidates do not match the dataset's features")
        n = dataset.n_samples
        self.n_samples = n
        self.n_features = dataset.n_features
        self.norm_factor = float(1.0 / np.sqrt(n)) if n else 0.0

        features = []
        thresholds = []
        counts = []
        orders = []
        for g in range(dataset.n_features):
            thr = splits.thresholds[g]
            if len(thr) == 0:
                continue
            values = dataset.feature_values(g)
            order = np.argsort(values, kind="stable").astype(np.intp)
            below = np.searchsorted(values[order], thr, side="right")
            if np.any(below < 1) or np.any(below >= n):
                raise ValueError(
                    f"feature {g} has thresholds that do not separate the samples"
                )
            features.append(g)
            thresholds.append(np.asarray(thr, dtype=np.float64))
            counts.append(below.astype(np.intp))
            orders.append(order)

        if not features:
            raise ValueError("no valid stump learners: every feature is constant")

        self.group_features = np.asarray(features, dtype=np.intp)
        self._thresholds = thresholds
        self._counts = counts
        self._orders = orders
        sizes = np.array([len(t) for t in thresholds], dtype=np.intp)
        self.group_offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.n_learners = int(self.group_offsets[-1])
        self.n_groups = len(features)

        # Padded (n_groups, max_group_size) index matrices so a scan over many
        # groups is a single gather + cumsum; padding is masked out.
        width = int(sizes.max())
        self._padded_counts = np.ones((self.n_groups, width), dtype=np.intp)
        self._pad_mask = np.zeros((self.n_groups, width), dtype=bool)
        for g, c in enumerate(counts):
            self._padded_counts[g, : len(c)] = c
            self._pad_mask[g, len(c):] = True
        self._order_matrix = np.vstack(orders)

    def group_of(self, j):
        """Group index holding learner ``j``."""
        return int(np.searchsorted(self.group_offsets, j, side="right") - 1)

    def learner_params(self, j):
        """(feature, threshold) pair of learner ``j``."""
        if not 0 <= j < self.n_learners:
            raise IndexError(f"learner index {j} out of range [0, {self.n_learners})")
        g = self.group_of(j)
        rank = j - self.group_offsets[g]
        return int(self.group_features[g]), float(self._thresholds[g][rank])

    def group_learners(self, g):
        """Learner indices forming group ``g``."""
        return np.arange(self.group_offsets[g], self.group_offsets[g + 1])

    def column(self, j):
        """Materialized prediction vector of learner ``j`` (unit norm)."""
        if not 0 <= j < self.n_learners:
            raise IndexError(f"learner index {j} out of range [0, {self.n_learners})")
        g = self.group_of(j)
        rank = j - self.group_offsets[g]
        col = np.full(self.n_samples, -self.norm_factor)
        col[self._orders[g][: self._counts[g][rank]]] = self.norm_factor
        return col

    def below_indices(self, j):
        """Sample indices on the +1 side of learner ``j``."""
        g = self.group_of(j)
        rank = j - self.group_offsets[g]
        return self._orders[g][: self._counts[g][rank]]

    def apply_update(self, predictions, j, step):
        """Add ``step * column(j)`` to the prediction vector in place."""
        g = self.group_of(j)
        rank = j - self.group_offsets[g]
        order = self._orders[g]
        cut = self._counts[g][rank]
        delta = step * self.norm_factor
        predictions[order[:cut]] += delta
        predictions[order[cut:]] -= delta

    def _group_scores(self, groups, v, total):
        gathered = v[self._order_matrix[groups]]
        prefixes = np.cumsum(gathered, axis=1)
        rows = np.arange(len(groups))[:, None]
        below_sums = prefixes[rows, self._padded_counts[groups] - 1]
        scores = (2.0 * below_sums - total) * self.norm_factor
        return scores

    def best_in_group(self, g, v):
        """Best learner of group ``g`` by |<B_j, v>|; ties go to the smallest index."""
        if not 0 <= g < self.n_groups:
            raise IndexError(f"group index {g} out of range [0, {self.n_groups})")
        return self.best_in_groups(np.array([g]), v)

    def best_in_groups(self, groups, v):
        """Best learner across several groups; ties go to the smallest learner index."""
        groups = np.sort(np.asarray(groups, dtype=np.intp))
        if groups.size == 0:
            raise ValueError("empty group set")
        v = np.asarray(v, dtype=np.float64)
        total = np.sum(v)
        scores = self._group_scores(groups, v, total)
        magnitudes = np.abs(scores)
        magnitudes[self._pad_mask[groups]] = -1.0

        best_rank = np.argmax(magnitudes, axis=1)
        rows = np.arange(len(groups))
        per_group_best = magnitudes[rows, best_rank]
        winner = int(np.argmax(per_group_best))
        g = groups[winner]
        rank = best_rank[winner]
        j = int(self.group_offsets[g] + rank)
        return CandidateBest(j, float(scores[winner, rank]))

    def best_overall(self, v):
        """Greedy scan over every learner (the deterministic full selection)."""
        return self.best_in_groups(np.arange(self.n_groups), v)

    def best_in_learner_subset(self, learners, v):
        """Best learner of an explicit index subset (random learner selection)."""
        learners = np.sort(np.asarray(learners, dtype=np.intp))
        if learners.size == 0:
            raise ValueError("empty learner subset")
        v = np.asarray(v, dtype=np.float64)
        total = np.sum(v)

        groups = np.searchsorted(self.group_offsets, learners, side="right") - 1
        best_j, best_score, best_mag = -1, 0.0, -1.0
        for g in np.unique(groups):
            ranks = learners[groups == g] - self.group_offsets[g]
            prefix = np.cumsum(v[self._orders[g]])
            scores = (2.0 * prefix[self._counts[g][ranks] - 1] - total) * self.norm_factor
            mags = np.abs(scores)
            k = int(np.argmax(mags))
            if mags[k] > best_mag:
                best_mag = float(mags[k])
                best_score = float(scores[k])
                best_j = int(self.group_offsets[g] + ranks[k])
        return CandidateBest(best_j, best_score)


class DenseBasis:
    """Explicit unit-norm columns with the same scan interface as StumpBasis.

    Used for verification-scale designs (orthogonal bases, hand-built
    matrices) where the columns are given directly rather than derived from
    data.
    """

    def __init__(self, columns, groups=None):
        columns = np.asarray(columns, dtype=np.float64)
        if columns.ndim != 2:
            raise ValueError("columns must be a 2-D array of shape (n_samples, n_learners)")
        norms = np.linalg.norm(columns, axis=0)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("every column must have unit Euclidean norm")
        self._columns = columns
        self.n_samples, self.n_learners = columns.shape
        if groups is None:
            groups = [np.array([j]) for j in range(self.n_learners)]
        self._groups = [np.sort(np.asarray(g, dtype=np.intp)) for g in groups]
        covered = np.concatenate(self._groups) if self._groups else np.empty(0, dtype=np.intp)
        if (
            len(covered) != self.n_learners
            or len(np.unique(covered)) != self.n_learners
            or (len(covered) and (covered.min() < 0 or covered.max() >= self.n_learners))
        ):
            raise ValueError("groups must partition the learner indices")
        if any(len(g) == 0 for g in self._groups):
            raise ValueError("groups must be nonempty")
        self.n_groups = len(self._groups)

    def group_learners(self, g):
        return self._groups[g].copy()

    def column(self, j):
        if not 0 <= j < self.n_learners:
            raise IndexError(f"learner index {j} out of range [0, {self.n_learners})")
        return self._columns[:, j].copy()

    def apply_update(self, predictions, j, step):
        predictions += step * self._columns[:, j]

    def best_in_learner_subset(self, learners, v):
        learners = np.sort(np.asarray(learners, dtype=np.intp))
        if learners.size == 0:
            raise ValueError("empty learner subset")
        scores = self._columns[:, learners].T @ np.asarray(v, dtype=np.float64)
        k = int(np.argmax(np.abs(scores)))
        return CandidateBest(int(learners[k]), float(scores[k]))

    def best_in_group(self, g, v):
        if not 0 <= g < self.n_groups:
            raise IndexError(f"group index {g} out of range [0, {self.n_groups})")
        return self.best_in_learner_subset(self._groups[g], v)

    def best_in_groups(self, groups, v):
        learners = np.concatenate([self._groups[g] for g in np.sort(np.asarray(groups))])
        return self.best_in_learner_subset(learners, v)

    def best_overall(self, v):
        return self.best_in_learner_subset(np.arange(self.n_learners), v)


def build_stump_basis(dataset, splits):
    """Build the stump design for a dataset and its split candidates."""
    return StumpBasis(dataset, splits)
