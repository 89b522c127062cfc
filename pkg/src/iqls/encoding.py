"""Binary encoding of real weights over a per-weight search box.

Each weight ``w_i`` gets ``m`` bits and is restricted to ``2**m`` equally
spaced values between the box bounds, endpoints included::

    w_i = lower_i + step_i * sum_p 2**(m - 1 - p) * b[i*m + p]

so bit ``p = 0`` is the most significant one. After a solve the box is
re-centred on the selected weights and shrunk by ``shrink_factor(m)``.

The shrink uses the step of the encoding that produced the weights (the
one in force during the iteration), which is what makes the width after
``k`` rounds equal ``width_0 / shrink_factor(m)**k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidArgumentError

MAX_BITS = 32


@dataclass(frozen=True)
class SearchBox:
    """Axis-aligned box stored as centre and half-width.

    Storing the half-width keeps box widths exact far below the spacing of
    floats near the centre, where ``upper - lower`` would round to zero.
    """

    center: np.ndarray
    half_width: np.ndarray

    def __post_init__(self):
        c = np.array(self.center, dtype=np.float64).reshape(-1)
        hw = np.array(self.half_width, dtype=np.float64).reshape(-1)
        if c.shape != hw.shape or c.size == 0:
            raise InvalidArgumentError(
                f"center and half_width must be non-empty and equal length, got {c.shape} and {hw.shape}"
            )
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(hw))):
            raise InvalidArgumentError("box bounds must be finite")
        if np.any(hw <= 0):
            raise InvalidArgumentError("box width must be strictly positive")
        c.flags.writeable = False
        hw.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "half_width", hw)

    @classmethod
    def from_bounds(cls, lower, upper) -> SearchBox:
        lower = np.asarray(lower, dtype=np.float64).reshape(-1)
        upper = np.asarray(upper, dtype=np.float64).reshape(-1)
        if lower.shape != upper.shape:
            raise InvalidArgumentError(
                f"lower and upper must have equal length, got {lower.shape} and {upper.shape}"
            )
        if np.any(upper <= lower):
            raise InvalidArgumentError("each lower bound must be strictly below its upper bound")
        return cls(0.5 * (lower + upper), 0.5 * (upper - lower))

    @classmethod
    def uniform(cls, lower: float, upper: float, d: int) -> SearchBox:
        """The box ``[lower, upper]**d``."""
        return cls.from_bounds(np.full(d, lower), np.full(d, upper))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.half_width

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.half_width

    @property
    def width(self) -> np.ndarray:
        return 2.0 * self.half_width

    def contains(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        return np.abs(w - self.center) <= self.half_width


@dataclass(frozen=True)
class BitEncoding:
    box: SearchBox
    bits_per_weight: int
    step: np.ndarray

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def num_vars(self) -> int:
        return self.box.dim * self.bits_per_weight

    @property
    def place_values(self) -> np.ndarray:
        """``2**(m-1-p)`` for ``p = 0..m-1``."""
        m = self.bits_per_weight
        return 2.0 ** np.arange(m - 1, -1, -1)

    def coefficients(self) -> np.ndarray:
        """Per-variable weight increment ``step_i * 2**(m-1-p)``, length ``d*m``."""
        return np.outer(self.step, self.place_values).reshape(-1)

    def owner(self) -> np.ndarray:
        """Index of the weight each variable belongs to."""
        return np.repeat(np.arange(self.dim), self.bits_per_weight)


def _check_bits_per_weight(m):
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)):
        raise InvalidArgumentError(f"bits per weight must be an integer, got {m!r}")
    if not 1 <= m <= MAX_BITS:
        raise InvalidArgumentError(f"bits per weight must be in [1, {MAX_BITS}], got {m}")
    return int(m)


def make_encoding(box: SearchBox, m: int) -> BitEncoding:
    m = _check_bits_per_weight(m)
    step = box.width / (2**m - 1)
    step.flags.writeable = False
    return BitEncoding(box=box, bits_per_weight=m, step=step)


def _check_bits(enc, bits):
    b = np.asarray(bits)
    if b.shape != (enc.num_vars,):
        raise InvalidArgumentError(
            f"expected {enc.num_vars} bits, got array of shape {b.shape}"
        )
    if not np.all((b == 0) | (b == 1)):
        raise InvalidArgumentError("bits must be 0 or 1")
    return b.astype(np.float64)


def grid_codes(enc: BitEncoding, bits) -> np.ndarray:
    """Integer grid index of each weight for a bit vector."""
    b = _check_bits(enc, bits).reshape(enc.dim, enc.bits_per_weight)
    return (b @ enc.place_values).astype(np.int64)


def decode(enc: BitEncoding, bits) -> np.ndarray:
    b = _check_bits(enc, bits).reshape(enc.dim, enc.bits_per_weight)
    return enc.box.lower + enc.step * (b @ enc.place_values)


def encode_codes(enc: BitEncoding, codes) -> np.ndarray:
    """Bit vector (MSB first per weight) for integer grid codes."""
    codes = np.asarray(codes, dtype=np.int64)
    m = enc.bits_per_weight
    if codes.shape != (enc.dim,) or np.any(codes < 0) or np.any(codes >= 2**m):
        raise InvalidArgumentError(f"codes must be {enc.dim} integers in [0, {2**m - 1}]")
    shifts = np.arange(m - 1, -1, -1)
    return ((codes[:, None] >> shifts) & 1).reshape(-1).astype(np.int8)


def step_divisor(m: int) -> int:
    """``f(m)``: 2 for one bit per weight, else 1."""
    return 2 if _check_bits_per_weight(m) == 1 else 1


def shrink_factor(m: int) -> float:
    """Per-iteration contraction of the box width, ``f(m) * (2**m - 1)``."""
    return float(step_divisor(m) * (2**m - 1))


def shrink(enc: BitEncoding, w_star) -> SearchBox:
    """Box of width ``step / f(m)`` centred on ``w_star``.

    With one bit per weight the grid is just the two endpoints, so the new
    box sits on one of them and never contains the other; the true optimum
    can fall outside it. No clamping to the original box is done.
    """
    w_star = np.asarray(w_star, dtype=np.float64)
    if w_star.shape != (enc.dim,):
        raise InvalidArgumentError(f"expected {enc.dim} weights, got shape {w_star.shape}")
    half = enc.step / (2.0 * step_divisor(enc.bits_per_weight))
    return SearchBox(w_star, half)
