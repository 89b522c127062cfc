"""Iterative QUBO-based least squares with a shrinking search box."""

__version__ = "0.1.0"

from .driver import IqlsConfig, IqlsTrace, IterationRecord, convergence_bound, run_iqls
from .encoding import BitEncoding, SearchBox, decode, make_encoding, shrink, shrink_factor
from .estimators import IQLSRegressor, LinearSplineFeatures
from .exceptions import (
    BudgetExceededError,
    InvalidArgumentError,
    QuboFormatError,
    RankDeficientError,
)
from .linalg import Dataset, GramCache, classical_ls, gram, mse, sse
from .qubo import Qubo, build_qubo, energy, export_qubo, import_qubo
from .solvers import AnnealConfig, SolveResult, solve, solve_anneal, solve_exhaustive
from .splines import SplineBasis, benchmark_functions, design_matrix, uniform_knots

__all__ = [
    "AnnealConfig",
    "BitEncoding",
    "BudgetExceededError",
    "Dataset",
    "GramCache",
    "IQLSRegressor",
    "InvalidArgumentError",
    "IqlsConfig",
    "IqlsTrace",
    "IterationRecord",
    "LinearSplineFeatures",
    "Qubo",
    "QuboFormatError",
    "RankDeficientError",
    "SearchBox",
    "SolveResult",
    "SplineBasis",
    "benchmark_functions",
    "build_qubo",
    "classical_ls",
    "convergence_bound",
    "decode",
    "design_matrix",
    "energy",
    "export_qubo",
    "gram",
    "import_qubo",
    "make_encoding",
    "mse",
    "run_iqls",
    "shrink",
    "shrink_factor",
    "solve",
    "solve_anneal",
    "solve_exhaustive",
    "sse",
    "uniform_knots",
]
