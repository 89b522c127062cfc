"""Degree-1 truncated-power spline basis and benchmark target functions.

A row of the design matrix is ``[1, x, (x - t_1)+, ..., (x - t_T)+]``, so any
continuous piecewise-linear function with breakpoints at the knots is a
plain linear model in these features and can be fitted by the same
least-squares machinery as a linear regression.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidArgumentError


@dataclass(frozen=True)
class SplineBasis:
    knots: np.ndarray
    x_min: float
    x_max: float

    def __post_init__(self):
        knots = np.array(self.knots, dtype=np.float64).reshape(-1)
        if knots.size == 0:
            raise InvalidArgumentError("need at least one knot")
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max) and self.x_min < self.x_max):
            raise InvalidArgumentError(f"invalid domain [{self.x_min}, {self.x_max}]")
        if np.any(np.diff(knots) <= 0):
            raise InvalidArgumentError("knots must be strictly increasing")
        if knots[0] <= self.x_min or knots[-1] >= self.x_max:
            raise InvalidArgumentError("knots must lie strictly inside the domain")
        knots.flags.writeable = False
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))

    @property
    def n_basis(self) -> int:
        return self.knots.size + 2


def uniform_knots(x_min: float, x_max: float, n_knots: int) -> SplineBasis:
    """``n_knots`` equally spaced interior knots."""
    if isinstance(n_knots, bool) or int(n_knots) != n_knots or n_knots < 1:
        raise InvalidArgumentError(f"number of knots must be a positive integer, got {n_knots!r}")
    if not x_min < x_max:
        raise InvalidArgumentError(f"invalid domain [{x_min}, {x_max}]")
    j = np.arange(1, int(n_knots) + 1)
    return SplineBasis(x_min + j * (x_max - x_min) / (n_knots + 1), x_min, x_max)


def design_matrix(basis: SplineBasis, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("x must be finite")
    hinges = np.maximum(x[:, None] - basis.knots[None, :], 0.0)
    return np.column_stack([np.ones_like(x), x, hinges])


def evaluate(basis: SplineBasis, coef, x) -> np.ndarray:
    """Value of the spline with coefficients ``coef`` at ``x``."""
    coef = np.asarray(coef, dtype=np.float64)
    if coef.shape != (basis.n_basis,):
        raise InvalidArgumentError(f"expected {basis.n_basis} coefficients, got shape {coef.shape}")
    return design_matrix(basis, x) @ coef


@dataclass(frozen=True)
class BenchmarkFunction:
    name: str
    func: object
    x_min: float
    x_max: float

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=np.float64))

    def sample(self, n: int):
        """``n`` equally spaced points over the domain and the function values there."""
        x = np.linspace(self.x_min, self.x_max, n)
        return x, self(x)


def _logistic(x):
    return 1.0 / (1.0 + np.exp(-x))


_BENCHMARKS = (
    BenchmarkFunction("sin", np.sin, 0.0, 2.0 * np.pi),
    BenchmarkFunction("tanh", np.tanh, -3.0, 3.0),
    BenchmarkFunction("logistic", _logistic, -6.0, 6.0),
    BenchmarkFunction("relu", lambda x: np.maximum(x, 0.0), -1.0, 1.0),
    BenchmarkFunction("gauss", lambda x: np.exp(-(x**2)), -3.0, 3.0),
)

BENCHMARK_NAMES = tuple(f.name for f in _BENCHMARKS)


def benchmark_functions() -> dict:
    """The five 1-D targets keyed by name, in a fixed order."""
    return {f.name: f for f in _BENCHMARKS}
