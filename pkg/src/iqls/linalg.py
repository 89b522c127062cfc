"""Residual metrics, Gram-matrix precomputation and a classical LS baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import InvalidArgumentError, RankDeficientError

# smallest admissible Cholesky pivot relative to the largest one
PIVOT_RTOL = 1e-10


@dataclass(frozen=True)
class Dataset:
    """Feature matrix ``X`` (N x d) and target vector ``y`` (N,).

    No intercept column is added; append a column of ones to ``X`` if one
    is wanted.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64)
        y = np.array(self.y, dtype=np.float64)
        if X.ndim != 2:
            raise InvalidArgumentError(f"X must be 2-D, got shape {X.shape}")
        if y.ndim != 1:
            raise InvalidArgumentError(f"y must be 1-D, got shape {y.shape}")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise InvalidArgumentError(f"X must be non-empty, got shape {X.shape}")
        if y.shape[0] != X.shape[0]:
            raise InvalidArgumentError(
                f"y has {y.shape[0]} entries but X has {X.shape[0]} rows"
            )
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise InvalidArgumentError("X and y must be finite")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class GramCache:
    """Sufficient statistics of a dataset for squared-error evaluation.

    ``sse(w) = yy - 2 w.h + w.G.w``, so anything built from the cache costs
    nothing per sample once the cache exists.
    """

    G: np.ndarray
    h: np.ndarray
    yy: float
    n_samples: int

    @property
    def n_features(self) -> int:
        return self.h.shape[0]

    def sse(self, w) -> float:
        w = _check_weights(w, self.n_features)
        return float(self.yy + w @ (self.G @ w - 2.0 * self.h))


def _check_weights(w, d):
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (d,):
        raise InvalidArgumentError(f"expected weight vector of length {d}, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise InvalidArgumentError("weights must be finite")
    return w


def residuals(ds: Dataset, w) -> np.ndarray:
    w = _check_weights(w, ds.n_features)
    return ds.y - ds.X @ w


def sse(ds: Dataset, w) -> float:
    """Sum of squared errors of the linear model ``X @ w`` against ``y``."""
    r = residuals(ds, w)
    return float(r @ r)


def mse(ds: Dataset, w) -> float:
    """Mean squared error, ``sse / N``."""
    return sse(ds, w) / ds.n_samples


def gram(ds: Dataset) -> GramCache:
    X, y = ds.X, ds.y
    G = X.T @ X
    # exact symmetry; X.T @ X is symmetric up to summation order only
    G = 0.5 * (G + G.T)
    G.flags.writeable = False
    h = X.T @ y
    h.flags.writeable = False
    return GramCache(G=G, h=h, yy=float(y @ y), n_samples=ds.n_samples)


def classical_ls(ds: Dataset | GramCache) -> np.ndarray:
    """Least-squares weights from the normal equations.

    The Gram matrix is factored with Cholesky; a pivot smaller than
    ``PIVOT_RTOL`` times the largest one raises :class:`RankDeficientError`.
    """
    gc = ds if isinstance(ds, GramCache) else gram(ds)
    G, h = gc.G, gc.h
    if not np.any(G):
        raise RankDeficientError("Gram matrix is identically zero (pivot 0)", pivot=0)
    try:
        c, lower = scipy.linalg.cho_factor(G, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        pivot = _failing_pivot(G)
        raise RankDeficientError(
            f"Gram matrix is not positive definite at pivot {pivot}: {exc}", pivot=pivot
        ) from exc
    pivots = np.diag(c) ** 2
    bad = np.flatnonzero(pivots < PIVOT_RTOL * pivots.max())
    if bad.size:
        pivot = int(bad[0])
        raise RankDeficientError(
            f"Gram matrix is rank deficient: pivot {pivot} is {pivots[pivot]:.3e}, "
            f"below {PIVOT_RTOL:g} x largest pivot {pivots.max():.3e}",
            pivot=pivot,
        )
    return scipy.linalg.cho_solve((c, lower), h, check_finite=False)


def _failing_pivot(G):
    # first leading principal submatrix that is not positive definite
    for k in range(1, G.shape[0] + 1):
        try:
            np.linalg.cholesky(G[:k, :k])
        except np.linalg.LinAlgError:
            return k - 1
    return G.shape[0] - 1
