"""scikit-learn compatible wrappers around the zoom-in solver and spline basis."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from .driver import IqlsConfig, run_iqls
from .encoding import SearchBox
from .exceptions import InvalidArgumentError
from .linalg import Dataset
from .solvers import AnnealConfig
from .splines import design_matrix, uniform_knots


def _make_box(bounds, d):
    b = np.asarray(bounds, dtype=np.float64)
    if b.shape == (2,):
        return SearchBox.uniform(b[0], b[1], d)
    if b.shape == (d, 2):
        return SearchBox.from_bounds(b[:, 0], b[:, 1])
    raise InvalidArgumentError(f"bounds must be a (lo, hi) pair or have shape ({d}, 2), got {b.shape}")


class IQLSRegressor(RegressorMixin, BaseEstimator):
    """Linear regression fitted by iterative QUBO zoom-in.

    Parameters
    ----------
    bits_per_weight : int
        Bits used to encode each weight per iteration.
    max_iterations : int
        Number of zoom-in rounds.
    bounds : (lo, hi) or array of shape (n_weights, 2)
        Initial search box. With ``fit_intercept`` the intercept is the last weight.
    solver : {"auto", "exhaustive", "anneal"}
    seed, num_restarts, sweeps_per_restart, beta_initial, beta_final
        Simulated-annealing settings, used by the anneal solver.
    loss_tolerance : float
        Stop once the MSE changes by less than this between iterations; 0 disables.
    fit_intercept : bool
        Append a constant feature. Off by default.

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    intercept_ : float
    trace_ : IqlsTrace
        Full per-iteration record.
    n_iter_ : int
    """

    def __init__(
        self,
        bits_per_weight=2,
        max_iterations=10,
        bounds=(-10.0, 10.0),
        solver="auto",
        seed=0,
        num_restarts=32,
        sweeps_per_restart=200,
        beta_initial=0.1,
        beta_final=10.0,
        loss_tolerance=0.0,
        fit_intercept=False,
    ):
        self.bits_per_weight = bits_per_weight
        self.max_iterations = max_iterations
        self.bounds = bounds
        self.solver = solver
        self.seed = seed
        self.num_restarts = num_restarts
        self.sweeps_per_restart = sweeps_per_restart
        self.beta_initial = beta_initial
        self.beta_final = beta_final
        self.loss_tolerance = loss_tolerance
        self.fit_intercept = fit_intercept

    def _config(self, d):
        return IqlsConfig(
            bits_per_weight=self.bits_per_weight,
            max_iterations=self.max_iterations,
            initial_box=_make_box(self.bounds, d),
            solver=self.solver,
            anneal=AnnealConfig(
                seed=self.seed,
                num_restarts=self.num_restarts,
                sweeps_per_restart=self.sweeps_per_restart,
                beta_initial=self.beta_initial,
                beta_final=self.beta_final,
            ),
            loss_tolerance=self.loss_tolerance,
        )

    def fit(self, X, y):
        X, y = validate_data(self, X, y, dtype=np.float64, y_numeric=True)
        if self.fit_intercept:
            X = np.column_stack([X, np.ones(X.shape[0])])
        self.trace_ = run_iqls(Dataset(X, y), self._config(X.shape[1]))
        w = self.trace_.final_weights
        if self.fit_intercept:
            self.coef_, self.intercept_ = w[:-1].copy(), float(w[-1])
        else:
            self.coef_, self.intercept_ = w.copy(), 0.0
        self.n_iter_ = len(self.trace_.records)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return X @ self.coef_ + self.intercept_


class LinearSplineFeatures(TransformerMixin, BaseEstimator):
    """Expand one input column into ``[1, x, (x - t_1)+, ..., (x - t_T)+]``.

    Knots are spread uniformly over the interior of the range seen in ``fit``.
    The leading constant column means a downstream regressor needs no
    intercept of its own.
    """

    def __init__(self, n_knots=20):
        self.n_knots = n_knots

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single input column, got {X.shape[1]}")
        self.n_features_in_ = 1
        self.basis_ = uniform_knots(float(X.min()), float(X.max()), self.n_knots)
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single input column, got {X.shape[1]}")
        return design_matrix(self.basis_, X[:, 0])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "basis_")
        name = "x" if input_features is None else input_features[0]
        hinges = [f"({name}-{t:.6g})+" for t in self.basis_.knots]
        return np.array(["1", name, *hinges], dtype=object)
