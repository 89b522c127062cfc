"""Iterative zoom-in least squares.

Each iteration encodes the weights with ``m`` bits over the current box,
reduces the squared error to a QUBO, solves it, decodes the selected
weights and re-centres a smaller box on them. The qubit count ``d * m``
never changes while the box width falls by ``shrink_factor(m)`` per round.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .encoding import SearchBox, decode, make_encoding, shrink, shrink_factor
from .exceptions import BudgetExceededError, InvalidArgumentError, RankDeficientError
from .linalg import Dataset, classical_ls, gram, sse
from .qubo import build_qubo
from .solvers import BACKENDS, AnnealConfig, solve

logger = logging.getLogger(__name__)

STOP_MAX_ITERATIONS = "max_iterations"
STOP_LOSS_TOLERANCE = "loss_tolerance"


@dataclass(frozen=True)
class IqlsConfig:
    bits_per_weight: int
    max_iterations: int
    initial_box: SearchBox
    solver: str = "auto"
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    loss_tolerance: float = 0.0

    def __post_init__(self):
        shrink_factor(self.bits_per_weight)  # validates m
        if self.max_iterations < 1:
            raise InvalidArgumentError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.solver not in BACKENDS:
            raise InvalidArgumentError(f"unknown solver {self.solver!r}; choose from {BACKENDS}")
        if not self.loss_tolerance >= 0:
            raise InvalidArgumentError("loss_tolerance must be non-negative")

    def to_dict(self) -> dict:
        return {
            "bits_per_weight": self.bits_per_weight,
            "max_iterations": self.max_iterations,
            "initial_lower": self.initial_box.lower.tolist(),
            "initial_upper": self.initial_box.upper.tolist(),
            "initial_midpoint": self.initial_box.center.tolist(),
            "solver": self.solver,
            "anneal": {
                "seed": int(self.anneal.seed),
                "num_restarts": self.anneal.num_restarts,
                "sweeps_per_restart": self.anneal.sweeps_per_restart,
                "beta_initial": self.anneal.beta_initial,
                "beta_final": self.anneal.beta_final,
            },
            "loss_tolerance": self.loss_tolerance,
        }


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    box_before: SearchBox
    box_after: SearchBox
    bits: np.ndarray
    weights: np.ndarray
    sse: float
    mse: float
    qubo_energy: float
    qubo_offset: float
    solver_name: str
    optimum_excluded: bool | None

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "lower": self.box_before.lower.tolist(),
            "upper": self.box_before.upper.tolist(),
            "width": self.box_before.width.tolist(),
            "next_lower": self.box_after.lower.tolist(),
            "next_upper": self.box_after.upper.tolist(),
            "next_width": self.box_after.width.tolist(),
            "bits": self.bits.astype(int).tolist(),
            "weights": self.weights.tolist(),
            "sse": self.sse,
            "mse": self.mse,
            "qubo_energy": self.qubo_energy,
            "qubo_offset": self.qubo_offset,
            "solver_name": self.solver_name,
            "optimum_excluded": self.optimum_excluded,
        }


@dataclass(frozen=True)
class IqlsTrace:
    config: IqlsConfig
    records: list
    stop_reason: str
    reference_weights: np.ndarray | None = None

    @property
    def final_weights(self) -> np.ndarray:
        return self.records[-1].weights

    @property
    def mse_history(self) -> np.ndarray:
        return np.array([r.mse for r in self.records])

    def truncated(self, k: int) -> IqlsTrace:
        """The trace as it stood after iteration ``k`` (anytime answer)."""
        if not 1 <= k <= len(self.records):
            raise InvalidArgumentError(f"k must be in [1, {len(self.records)}], got {k}")
        reason = self.stop_reason if k == len(self.records) else STOP_MAX_ITERATIONS
        return IqlsTrace(self.config, self.records[:k], reason, self.reference_weights)

    def to_dict(self) -> dict:
        ref = None if self.reference_weights is None else self.reference_weights.tolist()
        return {
            "config": self.config.to_dict(),
            "records": [r.to_dict() for r in self.records],
            "final_weights": self.final_weights.tolist(),
            "stop_reason": self.stop_reason,
            "reference_weights": ref,
        }


def _reference_solution(gc):
    try:
        return classical_ls(gc)
    except RankDeficientError as exc:
        logger.debug("no classical reference for exclusion checks: %s", exc)
        return None


def run_iqls(ds: Dataset, cfg: IqlsConfig, reference_weights="auto") -> IqlsTrace:
    """Run the zoom-in loop for ``cfg.max_iterations`` rounds.

    The loop stops early only when ``loss_tolerance > 0`` and the MSE moves
    by less than it between consecutive iterations; an MSE increase is
    recorded as-is. ``reference_weights`` ("auto" for the classical
    least-squares solution, or None to skip) is used only to flag
    iterations whose next box excludes it.
    """
    if cfg.initial_box.dim != ds.n_features:
        raise InvalidArgumentError(
            f"initial box has {cfg.initial_box.dim} dimensions but data has {ds.n_features} features"
        )
    gc = gram(ds)
    if isinstance(reference_weights, str) and reference_weights == "auto":
        reference = _reference_solution(gc)
    elif reference_weights is None:
        reference = None
    else:
        reference = np.asarray(reference_weights, dtype=np.float64)

    box = cfg.initial_box
    records = []
    stop_reason = STOP_MAX_ITERATIONS
    for k in range(1, cfg.max_iterations + 1):
        enc = make_encoding(box, cfg.bits_per_weight)
        q = build_qubo(gc, enc)
        try:
            result = solve(q, cfg.solver, cfg.anneal)
        except BudgetExceededError as exc:
            raise BudgetExceededError(f"iteration {k}: {exc}") from exc
        weights = decode(enc, result.bits)
        weights.flags.writeable = False
        next_box = shrink(enc, weights)
        err = sse(ds, weights)
        excluded = None if reference is None else bool(not np.all(next_box.contains(reference)))
        records.append(
            IterationRecord(
                iteration=k,
                box_before=box,
                box_after=next_box,
                bits=np.asarray(result.bits, dtype=np.int8),
                weights=weights,
                sse=err,
                mse=err / ds.n_samples,
                qubo_energy=result.energy,
                qubo_offset=q.offset,
                solver_name=result.solver_name,
                optimum_excluded=excluded,
            )
        )
        logger.debug("iteration %d: mse=%.6e solver=%s", k, err / ds.n_samples, result.solver_name)
        box = next_box
        if (
            cfg.loss_tolerance > 0
            and len(records) > 1
            and abs(records[-1].mse - records[-2].mse) < cfg.loss_tolerance
        ):
            stop_reason = STOP_LOSS_TOLERANCE
            break
    return IqlsTrace(cfg, records, stop_reason, reference)


def convergence_bound(m: int, K: int, initial_width) -> float | np.ndarray:
    """Box width guaranteed after ``K`` iterations: ``initial_width / shrink_factor(m)**K``."""
    if K < 0:
        raise InvalidArgumentError(f"K must be non-negative, got {K}")
    return np.asarray(initial_width, dtype=np.float64) / shrink_factor(m) ** K
