"""Reduction of the discretized squared error to a QUBO, and its serialization.

Writing the weights as ``w = lower + A b`` with ``A[i, r] = step_i * 2**(m-1-p)``
for variable ``r = (i, p)``, the squared error expands to::

    sse(b) = sse(lower) + 2 b.A^T(G lower - h) + b.A^T G A.b

and ``b_r**2 = b_r`` moves the diagonal of ``A^T G A`` into the linear
terms. Only the Gram statistics are touched, never the samples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .encoding import BitEncoding
from .exceptions import InvalidArgumentError, QuboFormatError
from .linalg import GramCache

FORMAT_NAME = "iqls-qubo"
FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class Qubo:
    """``offset + linear.b + sum_{r<s} quadratic[r, s] b_r b_s`` over binary ``b``.

    ``quadratic`` is a dense ``n x n`` array whose only non-zero entries lie
    strictly above the diagonal.
    """

    offset: float
    linear: np.ndarray
    quadratic: np.ndarray

    def __post_init__(self):
        lin = np.array(self.linear, dtype=np.float64).reshape(-1)
        n = lin.shape[0]
        if n < 1:
            raise InvalidArgumentError("a QUBO needs at least one variable")
        quad = np.array(self.quadratic, dtype=np.float64)
        if quad.shape != (n, n):
            raise InvalidArgumentError(f"quadratic must be {n}x{n}, got {quad.shape}")
        if np.any(np.tril(quad)):
            raise InvalidArgumentError("quadratic coefficients must be strictly upper triangular")
        if not (np.isfinite(self.offset) and np.all(np.isfinite(lin)) and np.all(np.isfinite(quad))):
            raise InvalidArgumentError("QUBO coefficients must be finite")
        lin.flags.writeable = False
        quad.flags.writeable = False
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "quadratic", quad)

    @classmethod
    def from_terms(cls, num_vars: int, offset: float, linear, quadratic: dict) -> Qubo:
        """Build from a linear sequence/dict and a ``{(r, s): coeff}`` map with ``r < s``."""
        lin = np.zeros(num_vars)
        items = linear.items() if isinstance(linear, dict) else enumerate(linear)
        for r, c in items:
            lin[r] = c
        quad = np.zeros((num_vars, num_vars))
        for (r, s), c in quadratic.items():
            if not 0 <= r < s < num_vars:
                raise InvalidArgumentError(f"quadratic key {(r, s)} must satisfy 0 <= r < s < {num_vars}")
            quad[r, s] = c
        return cls(offset, lin, quad)

    @property
    def num_vars(self) -> int:
        return self.linear.shape[0]

    def quadratic_terms(self) -> dict:
        rows, cols = np.nonzero(self.quadratic)
        return {(int(r), int(s)): float(self.quadratic[r, s]) for r, s in zip(rows, cols)}

    def symmetric_couplings(self) -> np.ndarray:
        """Symmetric zero-diagonal matrix ``J`` with ``sum_{r<s} Q_rs b_r b_s = b.J.b / 2``."""
        return self.quadratic + self.quadratic.T

    def __eq__(self, other):
        if not isinstance(other, Qubo):
            return NotImplemented
        return (
            self.offset == other.offset
            and np.array_equal(self.linear, other.linear)
            and np.array_equal(self.quadratic, other.quadratic)
        )

    __hash__ = None


def build_qubo(gc: GramCache, enc: BitEncoding) -> Qubo:
    if gc.n_features != enc.dim:
        raise InvalidArgumentError(
            f"Gram cache has {gc.n_features} features but encoding has {enc.dim} weights"
        )
    lower = enc.box.lower
    a = enc.coefficients()
    owner = enc.owner()
    # A^T G A restricted to variable pairs
    M = gc.G[np.ix_(owner, owner)] * np.outer(a, a)
    grad = gc.G @ lower - gc.h
    linear = 2.0 * a * grad[owner] + np.diag(M)
    quadratic = np.triu(2.0 * M, k=1)
    offset = gc.yy + lower @ (gc.G @ lower - 2.0 * gc.h)
    return Qubo(offset, linear, quadratic)


def _check_bits(q, bits):
    b = np.asarray(bits)
    if b.shape != (q.num_vars,):
        raise InvalidArgumentError(f"expected {q.num_vars} bits, got array of shape {b.shape}")
    if not np.all((b == 0) | (b == 1)):
        raise InvalidArgumentError("bits must be 0 or 1")
    return b.astype(np.float64)


def energy(q: Qubo, bits) -> float:
    b = _check_bits(q, bits)
    return float(q.offset + q.linear @ b + b @ (q.quadratic @ b))


def energies(q: Qubo, bits) -> np.ndarray:
    """Energies of a batch of assignments, one per row; no validation."""
    B = np.asarray(bits, dtype=np.float64)
    return q.offset + B @ q.linear + np.einsum("ij,ij->i", B @ q.quadratic, B)


def export_qubo(q: Qubo) -> str:
    """Serialize to a JSON document; exact zeros are left out of both term lists."""
    rows, cols = np.nonzero(q.quadratic)
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "num_vars": q.num_vars,
        "offset": q.offset,
        "linear": [[int(r), float(q.linear[r])] for r in np.flatnonzero(q.linear)],
        "quadratic": [[int(r), int(s), float(q.quadratic[r, s])] for r, s in zip(rows, cols)],
    }
    # repr-based float output round-trips every float64 exactly
    return json.dumps(doc, indent=1)


def _number(field, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise QuboFormatError(field, f"expected a number, got {value!r}")
    if not np.isfinite(value):
        raise QuboFormatError(field, "coefficient is not finite")
    return float(value)


def _index(field, value, n):
    if isinstance(value, bool) or not isinstance(value, int):
        raise QuboFormatError(field, f"expected an integer index, got {value!r}")
    if not 0 <= value < n:
        raise QuboFormatError(field, f"index out of range: {value} not in [0, {n})")
    return value


def import_qubo(doc) -> Qubo:
    """Parse a document produced by :func:`export_qubo` (string or already-decoded dict)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise QuboFormatError("document", f"not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise QuboFormatError("document", "expected a JSON object")
    for key in ("format", "version", "num_vars", "offset", "linear", "quadratic"):
        if key not in doc:
            raise QuboFormatError(key, "missing field")
    if doc["format"] != FORMAT_NAME:
        raise QuboFormatError("format", f"unknown format {doc['format']!r}")
    if doc["version"] != FORMAT_VERSION:
        raise QuboFormatError("version", f"unknown version {doc['version']!r}")
    n = doc["num_vars"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise QuboFormatError("num_vars", f"expected a positive integer, got {n!r}")
    offset = _number("offset", doc["offset"])

    if not isinstance(doc["linear"], list):
        raise QuboFormatError("linear", "expected a list of [index, coefficient] entries")
    linear = np.zeros(n)
    seen = set()
    for k, entry in enumerate(doc["linear"]):
        field = f"linear[{k}]"
        if not isinstance(entry, list) or len(entry) != 2:
            raise QuboFormatError(field, "expected [index, coefficient]")
        r = _index(field, entry[0], n)
        if r in seen:
            raise QuboFormatError(field, f"duplicate key {r}")
        seen.add(r)
        linear[r] = _number(field, entry[1])

    if not isinstance(doc["quadratic"], list):
        raise QuboFormatError("quadratic", "expected a list of [i, j, coefficient] entries")
    quad = np.zeros((n, n))
    seen = set()
    for k, entry in enumerate(doc["quadratic"]):
        field = f"quadratic[{k}]"
        if not isinstance(entry, list) or len(entry) != 3:
            raise QuboFormatError(field, "expected [i, j, coefficient]")
        r = _index(field, entry[0], n)
        s = _index(field, entry[1], n)
        if r >= s:
            raise QuboFormatError(field, f"unordered pair ({r}, {s}); need i < j")
        if (r, s) in seen:
            raise QuboFormatError(field, f"duplicate key ({r}, {s})")
        seen.add((r, s))
        quad[r, s] = _number(field, entry[2])
    return Qubo(offset, linear, quad)
