import numpy as np
import pytest

from rgbm import Dataset, StumpBasis, feature_quantiles


def make_regression_data(n=50, p=5, seed=42, noise=1.0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    w = rng.standard_normal(p)
    y = X @ w + noise * rng.standard_normal(n)
    return Dataset.from_arrays(X, y)


def make_classification_data(n=50, p=5, seed=42):
    d = make_regression_data(n=n, p=p, seed=seed, noise=0.5)
    labels = np.where(d.labels > 0, 1.0, -1.0)
    return d.with_labels(labels)


def make_basis(dataset, q_count=20):
    return StumpBasis(dataset, feature_quantiles(dataset, q_count))


def write_binary_libsvm(path, n=5000, p=123, seed=0):
    """A9a-shaped synthetic data: sparse binary indicator features, +-1 labels."""
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(p) * (rng.random(p) < 0.3)
    lines = []
    for _ in range(n):
        k = max(1, rng.binomial(p, 14 / 123))
        idx = np.sort(rng.choice(p, size=k, replace=False))
        margin = w[idx].sum() + 0.5 * rng.standard_normal()
        label = "+1" if margin > 0 else "-1"
        lines.append(f"{label} " + " ".join(f"{j + 1}:1" for j in idx))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


@pytest.fixture(scope="session")
def binary_libsvm_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "binary5000.svm"
    return write_binary_libsvm(path)
