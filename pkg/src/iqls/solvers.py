"""QUBO minimizers sharing one result type.

``solve_exhaustive`` enumerates every assignment and is the ground truth for
small problems. ``solve_anneal`` is a single-bit-flip Metropolis annealer
used in place of annealing hardware.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import BudgetExceededError, InvalidArgumentError
from .qubo import Qubo, energies, energy

EXHAUSTIVE_MAX_VARS = 24
AUTO_EXHAUSTIVE_MAX_VARS = 20
TIE_ATOL = 1e-12
_CHUNK = 1 << 14

BACKENDS = ("auto", "exhaustive", "anneal")


@dataclass(frozen=True, eq=False)
class SolveResult:
    bits: np.ndarray
    energy: float
    solver_name: str
    metadata: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, SolveResult):
            return NotImplemented
        return (
            np.array_equal(self.bits, other.bits)
            and self.energy == other.energy
            and self.solver_name == other.solver_name
            and self.metadata == other.metadata
        )

    __hash__ = None


@dataclass(frozen=True)
class AnnealConfig:
    """Simulated-annealing schedule.

    Inverse temperatures apply to the QUBO rescaled so that its largest
    absolute linear or quadratic coefficient is 1; the same schedule then
    works at every iteration even though coefficients shrink with the box.
    """

    seed: int = 0
    num_restarts: int = 32
    sweeps_per_restart: int = 200
    beta_initial: float = 0.1
    beta_final: float = 10.0

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise InvalidArgumentError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError(f"seed must be a non-negative 64-bit integer, got {self.seed}")
        if self.num_restarts < 1:
            raise InvalidArgumentError("num_restarts must be positive")
        if self.sweeps_per_restart < 1:
            raise InvalidArgumentError("sweeps_per_restart must be positive")
        if not 0 < self.beta_initial < self.beta_final:
            raise InvalidArgumentError("need 0 < beta_initial < beta_final")

    def betas(self) -> np.ndarray:
        """Geometric inverse-temperature schedule, one value per sweep."""
        n = self.sweeps_per_restart
        if n == 1:
            return np.array([self.beta_final])
        return np.geomspace(self.beta_initial, self.beta_final, n)


def _assignments(start, stop, n):
    # row k is the binary expansion of start + k, variable 0 most significant,
    # so row order is lexicographic order of bit vectors
    idx = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.int8)


def solve_exhaustive(q: Qubo) -> SolveResult:
    """Global minimum by enumeration.

    Energies within ``TIE_ATOL`` of the minimum count as ties, and the
    lexicographically smallest tied bit vector is returned.
    """
    n = q.num_vars
    if n > EXHAUSTIVE_MAX_VARS:
        raise BudgetExceededError(
            f"exhaustive search over {n} variables exceeds the 2**{EXHAUSTIVE_MAX_VARS} "
            "enumeration budget; use the anneal solver"
        )
    total = 1 << n
    best = np.inf
    for start in range(0, total, _CHUNK):
        e = energies(q, _assignments(start, min(start + _CHUNK, total), n))
        best = min(best, float(e.min()))
    for start in range(0, total, _CHUNK):
        B = _assignments(start, min(start + _CHUNK, total), n)
        hits = np.flatnonzero(energies(q, B) <= best + TIE_ATOL)
        if hits.size:
            bits = B[hits[0]]
            break
    return SolveResult(
        bits=bits,
        energy=energy(q, bits),
        solver_name="exhaustive",
        metadata={"assignments": total},
    )


def _restart_streams(cfg, n):
    inits, uniforms = [], []
    for seq in np.random.SeedSequence(int(cfg.seed)).spawn(cfg.num_restarts):
        rng = np.random.default_rng(seq)
        inits.append(rng.integers(0, 2, size=n))
        uniforms.append(rng.random((cfg.sweeps_per_restart, n)))
    return np.array(inits, dtype=np.float64), np.stack(uniforms)


def solve_anneal(q: Qubo, cfg: AnnealConfig | None = None) -> SolveResult:
    """Best state seen over ``cfg.num_restarts`` independent annealing runs.

    Restart ``j`` draws its initial state and acceptance variates from the
    stream spawned from ``(cfg.seed, j)``. All restarts advance together as
    rows of one array; a flip updates each variable's local field in O(n).
    Each restart's best state is finished with a zero-temperature descent,
    which picks up gains too small for the final temperature to resolve.
    Ties between restarts go to the lowest restart index.
    """
    cfg = cfg or AnnealConfig()
    n = q.num_vars
    meta = {
        "seed": int(cfg.seed),
        "restarts": cfg.num_restarts,
        "sweeps": cfg.sweeps_per_restart,
        "beta_initial": cfg.beta_initial,
        "beta_final": cfg.beta_final,
    }
    scale = max(np.abs(q.linear).max(), np.abs(q.quadratic).max())
    b, U = _restart_streams(cfg, n)
    if scale == 0.0:
        bits = b[0].astype(np.int8)
        return SolveResult(bits, float(q.offset), "anneal", {**meta, "best_restart": 0})

    h = q.linear / scale
    J = q.symmetric_couplings() / scale
    local = h + b @ J
    cur = b @ h + 0.5 * np.einsum("ij,ij->i", b @ J, b)
    best_e = cur.copy()
    best_b = b.copy()
    for t, beta in enumerate(cfg.betas()):
        u_t = U[:, t, :]
        for r in range(n):
            up = 1.0 - 2.0 * b[:, r]
            delta = up * local[:, r]
            accept = (delta <= 0.0) | (u_t[:, r] < np.exp(-beta * np.maximum(delta, 0.0)))
            if not accept.any():
                continue
            move = up * accept
            b[:, r] += move
            local += np.outer(move, J[r])
            cur += delta * accept
            better = cur < best_e
            if better.any():
                best_e[better] = cur[better]
                best_b[better] = b[better]
    best_b, quench_sweeps = _quench(best_b, h, J)
    exact = energies(q, best_b)
    k = int(np.argmin(exact))
    bits = best_b[k].astype(np.int8)
    meta["quench_sweeps"] = quench_sweeps
    return SolveResult(
        bits=bits,
        energy=energy(q, bits),
        solver_name="anneal",
        metadata={**meta, "best_restart": k},
    )


def _quench(b, h, J, max_sweeps=1000):
    """Zero-temperature single-flip descent until no flip lowers the energy."""
    b = b.copy()
    local = h + b @ J
    # ignore gains at rounding level so the descent cannot cycle
    tol = 1e-13 * (1.0 + np.abs(h).sum() + np.abs(J).sum())
    for sweep in range(1, max_sweeps + 1):
        changed = False
        for r in range(b.shape[1]):
            up = 1.0 - 2.0 * b[:, r]
            accept = up * local[:, r] < -tol
            if accept.any():
                move = up * accept
                b[:, r] += move
                local += np.outer(move, J[r])
                changed = True
        if not changed:
            return b, sweep
    return b, max_sweeps


def solve(q: Qubo, backend: str = "auto", cfg: AnnealConfig | None = None) -> SolveResult:
    """Dispatch to a solver; ``auto`` enumerates up to 20 variables, else anneals."""
    if backend not in BACKENDS:
        raise InvalidArgumentError(f"unknown solver {backend!r}; choose from {BACKENDS}")
    if backend == "auto":
        backend = "exhaustive" if q.num_vars <= AUTO_EXHAUSTIVE_MAX_VARS else "anneal"
    if backend == "exhaustive":
        return solve_exhaustive(q)
    return solve_anneal(q, cfg)
