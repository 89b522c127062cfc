"""Seeded synthetic regression data."""

import numpy as np

from .exceptions import InvalidArgumentError
from .linalg import Dataset


def make_linear(n_samples=100, n_features=2, domain=(-5.0, 5.0), noise=0.0, seed=0,
                weight_range=(-5.0, 5.0)):
    """Features uniform on ``domain``, targets ``X @ w_true`` plus Gaussian noise.

    Returns ``(dataset, w_true)``. Everything is drawn from one generator
    seeded with ``seed``, in a fixed order, so output is reproducible.
    """
    lo, hi = domain
    if n_samples < 1 or n_features < 1:
        raise InvalidArgumentError("n_samples and n_features must be positive")
    if not lo < hi:
        raise InvalidArgumentError(f"invalid domain {domain}")
    if noise < 0:
        raise InvalidArgumentError("noise must be non-negative")
    rng = np.random.default_rng(seed)
    w_true = rng.uniform(*weight_range, n_features)
    X = rng.uniform(lo, hi, (n_samples, n_features))
    y = X @ w_true
    if noise > 0:
        y = y + rng.normal(0.0, noise, n_samples)
    return Dataset(X, y), w_true
