"""LIBSVM-format datasets, seeded train/test splits and quantile split candidates."""

from __future__ import annotations

import io

import numpy as np
from scipy import sparse


class LibsvmFormatError(ValueError):
    """Raised when a LIBSVM text stream violates the `<label> <idx>:<val> ...` format."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class Dataset:
    """A labeled sample set with sparse features (absent feature values are 0).

    Parameters
    ----------
    X : scipy sparse matrix or dense array, shape (n_samples, n_features)
        Feature matrix. Stored internally as CSR.
    labels : array, shape (n_samples,)
        Real-valued targets; classification labels are mapped separately
        (see :func:`to_binary_labels`).
    """

    def __init__(self, X, labels):
        X = sparse.csr_matrix(X, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64)
        if X.shape[0] != labels.shape[0]:
            raise ValueError(
                f"feature matrix has {X.shape[0]} rows but {labels.shape[0]} labels"
            )
        self._X = X
        self._X_csc = None
        self.labels = labels

    @classmethod
    def from_arrays(cls, X, y):
        """Build a dataset from a dense (or sparse) feature matrix and targets."""
        return cls(X, y)

    @property
    def n_samples(self):
        return self._X.shape[0]

    @property
    def n_features(self):
        return self._X.shape[1]

    def feature_values(self, g):
        """Dense column of feature ``g`` over all samples (zeros included)."""
        if self._X_csc is None:
            self._X_csc = self._X.tocsc()
        return np.asarray(self._X_csc[:, g].todense()).ravel()

    def row(self, i):
        """Sparse row ``i`` as (feature_indices, values), both ascending in index."""
        start, stop = self._X.indptr[i], self._X.indptr[i + 1]
        return self._X.indices[start:stop].copy(), self._X.data[start:stop].copy()

    def toarray(self):
        """Dense (n_samples, n_features) feature matrix."""
        return self._X.toarray()

    def subset(self, indices):
        """New dataset restricted to the given sample indices (order preserved)."""
        indices = np.asarray(indices, dtype=np.intp)
        return Dataset(self._X[indices], self.labels[indices])

    def with_labels(self, labels):
        """Same features, different labels (e.g. after classification mapping)."""
        return Dataset(self._X, labels)


def parse_libsvm(text, n_features=None):
    """Parse LIBSVM text (`<label> <idx>:<val> ...`, 1-based ascending indices).

    Parameters
    ----------
    text : str, bytes or file-like
        The raw content. Empty lines are skipped; row order is preserved.
    n_features : int, optional
        Override for the feature count; must be at least the maximum index seen.

    Returns
    -------
    Dataset
        Labels are kept exactly as written (0/1, +-1 or reals).

    Raises
    ------
    LibsvmFormatError
        On malformed entries, non-ascending or duplicate indices, with the
        offending line number.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    if hasattr(text, "read"):
        text = text.read()
        if isinstance(text, bytes):
            text = text.decode("ascii")

    labels = []
    data = []
    indices = []
    indptr = [0]
    max_index = 0

    for line_no, line in enumerate(io.StringIO(text), start=1):
        line = line.strip()
        if not line:
            continue
        tokens = line.split()
        try:
            labels.append(float(tokens[0]))
        except ValueError:
            raise LibsvmFormatError(line_no, f"bad label {tokens[0]!r}") from None
        prev = 0
        for token in tokens[1:]:
            idx_str, _, val_str = token.partition(":")
            try:
                idx = int(idx_str)
                val = float(val_str)
            except ValueError:
                raise LibsvmFormatError(line_no, f"bad feature entry {token!r}") from None
            if idx < 1:
                raise LibsvmFormatError(line_no, f"feature index {idx} is not 1-based")
            if idx <= prev:
                raise LibsvmFormatError(
                    line_no, f"feature index {idx} not ascending (previous {prev})"
                )
            prev = idx
            max_index = max(max_index, idx)
            indices.append(idx - 1)
            data.append(val)
        indptr.append(len(indices))

    if n_features is None:
        n_features = max_index
    elif n_features < max_index:
        raise ValueError(f"n_features={n_features} below maximum index {max_index}")

    X = sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.intp), np.asarray(indptr, dtype=np.intp)),
        shape=(len(labels), n_features),
    )
    return Dataset(X, np.asarray(labels))


def load_libsvm(path, n_features=None):
    """Parse a LIBSVM file from disk."""
    with open(path, "r", encoding="ascii") as fh:
        return parse_libsvm(fh.read(), n_features=n_features)


def write_libsvm(dataset, path=None):
    """Serialize a dataset back to LIBSVM text (1-based indices). Returns the text."""
    lines = []
    for i in range(dataset.n_samples):
        idx, val = dataset.row(i)
        entries = " ".join(f"{j + 1}:{v:.17g}" for j, v in zip(idx, val))
        label = dataset.labels[i]
        lines.append(f"{label:.17g} {entries}".rstrip())
    text = "\n".join(lines) + ("\n" if lines else "")
    if path is not None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    return text


def to_binary_labels(labels):
    """Map classification labels onto {-1, +1}.

    Labels already in {-1, +1} pass through; {0, 1} labels are mapped to
    {-1, +1}. Anything else is an error rather than a silent recode.
    """
    labels = np.asarray(labels, dtype=np.float64)
    values = set(np.unique(labels))
    if values <= {-1.0, 1.0}:
        return labels.copy()
    if values <= {0.0, 1.0}:
        return 2.0 * labels - 1.0
    raise ValueError(f"cannot map labels {sorted(values)} onto {{-1, +1}}")


def train_test_split(dataset, train_fraction, seed):
    """Seeded disjoint split into (train, test) datasets.

    The train size is ``round(train_fraction * n)`` (half away from zero) and
    the shuffle is a Fisher-Yates permutation from a PCG64 generator, so the
    same seed always yields the same partition.
    """
    n = dataset.n_samples
    if n < 2:
        raise ValueError(f"need at least 2 samples to split, got {n}")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")

    n_train = int(np.floor(train_fraction * n + 0.5))
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return dataset.subset(train_idx), dataset.subset(test_idx)


class SplitCandidates:
    """Per-feature ascending threshold lists for stump splits.

    Thresholds sit at data values so the test ``x_g <= s`` is well defined,
    and the per-feature maximum is never a threshold (it would put every
    sample on one side).
    """

    def __init__(self, thresholds):
        self.thresholds = [np.asarray(t, dtype=np.float64) for t in thresholds]

    @property
    def n_features(self):
        return len(self.thresholds)

    def total_count(self):
        return sum(len(t) for t in self.thresholds)


def feature_quantiles(dataset, q_count):
    """Quantile split candidates over each feature's distinct values.

    For a feature with m distinct sorted values, the candidates are the values
    at positions ``ceil(k * m / q_count) - 1`` for k = 1..q_count-1,
    deduplicated, with the maximum value dropped. Constant features yield an
    empty list.
    """
    if q_count < 1:
        raise ValueError(f"q_count must be >= 1, got {q_count}")

    per_feature = []
    for g in range(dataset.n_features):
        distinct = np.unique(dataset.feature_values(g))
        m = len(distinct)
        if m <= 1:
            per_feature.append(np.empty(0))
            continue
        ks = np.arange(1, q_count)
        positions = np.unique((ks * m + q_count - 1) // q_count - 1)
        chosen = distinct[positions]
        per_feature.append(chosen[chosen < distinct[-1]])
    return SplitCandidates(per_feature)
