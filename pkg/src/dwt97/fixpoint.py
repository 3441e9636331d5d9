"""Q2.8 lifting constants and multiplierless (shift-add) constant multiplication.

Every constant is a 10-bit two's-complement integer with an implied scale of
1/256.  Multiplication by a constant is realised as a sum of shifted copies of
the multiplicand, one per set bit of the constant's encoding, the sign bit
contributing a subtracted term.  Products are brought back to integer scale by
an arithmetic right shift of 8 bits (floor division by 256).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from dwt97.errors import RangeError

FRAC_BITS = 8
SCALE = 1 << FRAC_BITS
COEFF_BITS = 10

# Minimum accumulator for an 11-bit operand times a 10-bit constant.
ACC_BITS = 22

COEFF_NAMES = ("alpha", "beta", "gamma", "delta", "neg_k", "inv_k")
# rescaling constants of the approximate integer inverse
INVERSE_NAMES = ("k", "neg_inv_k")

# name -> (floating point value, binary encoding, integer-column numerator)
_TABLE = {
    "alpha": (-1.586134342, "10.01101010", -406),
    "beta": (-0.052980118, "11.11110010", -14),
    "gamma": (0.882911075, "00.11100010", 226),
    "delta": (0.443506852, "00.01110001", 114),
    "neg_k": (-1.230174105, "10.11000101", -314),
    "inv_k": (0.812893066, "00.11010000", 208),
}

VARIANTS = ("binary", "integer")


def decode_twos(bits: str) -> int:
    """Decode a two's-complement bit string (an optional binary point is ignored)."""
    digits = bits.replace(".", "")
    if not digits or set(digits) - {"0", "1"}:
        raise ValueError(f"not a binary word: {bits!r}")
    value = int(digits, 2)
    if digits[0] == "1":
        value -= 1 << len(digits)
    return value


def encode_twos(value: int, width: int) -> str:
    """Two's-complement encoding of ``value`` as a ``width``-character bit string."""
    if not fits_signed(value, width):
        raise RangeError(f"{value} does not fit in {width} two's-complement bits")
    return format(value & ((1 << width) - 1), f"0{width}b")


def fits_signed(value: int, width: int) -> bool:
    return -(1 << (width - 1)) <= value < (1 << (width - 1))


def signed_width(lo: int, hi: int) -> int:
    """Smallest two's-complement width holding every integer in [lo, hi]."""
    width = 1
    while not (fits_signed(lo, width) and fits_signed(hi, width)):
        width += 1
    return width


@dataclass(frozen=True)
class ScaledCoeff:
    name: str
    float_value: float
    scaled_int: int
    bit_width: int = COEFF_BITS

    def __post_init__(self):
        if self.name not in COEFF_NAMES + INVERSE_NAMES:
            raise ValueError(f"unknown coefficient name {self.name!r}")
        if not fits_signed(self.scaled_int, self.bit_width):
            raise RangeError(
                f"{self.name}: {self.scaled_int} does not fit in {self.bit_width} bits"
            )

    @classmethod
    def from_binary(cls, name: str, float_value: float, bits: str) -> "ScaledCoeff":
        digits = bits.replace(".", "")
        return cls(name, float_value, decode_twos(digits), len(digits))

    @property
    def encoding(self) -> str:
        return encode_twos(self.scaled_int, self.bit_width)

    @property
    def binary(self) -> str:
        """Encoding with the binary point placed after the two integer bits."""
        word = self.encoding
        return word[:2] + "." + word[2:]

    @property
    def value(self) -> float:
        return self.scaled_int / SCALE


class CoeffSet(Sequence):
    """The six lifting constants, indexable by position or by name."""

    def __init__(self, coeffs, variant="custom"):
        coeffs = tuple(coeffs)
        names = tuple(c.name for c in coeffs)
        if sorted(names) != sorted(COEFF_NAMES):
            raise ValueError(f"need exactly one of each of {COEFF_NAMES}, got {names}")
        self._by_name = {c.name: c for c in coeffs}
        self._items = tuple(self._by_name[n] for n in COEFF_NAMES)
        self.variant = variant

    def __getitem__(self, key):
        if isinstance(key, str):
            return self._by_name[key]
        return self._items[key]

    def __len__(self):
        return len(self._items)

    def __iter__(self) -> Iterator[ScaledCoeff]:
        return iter(self._items)

    def __eq__(self, other):
        return isinstance(other, CoeffSet) and self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        body = ", ".join(f"{c.name}={c.scaled_int}" for c in self._items)
        return f"CoeffSet({self.variant}: {body})"

    def replace(self, **scaled) -> "CoeffSet":
        items = [
            ScaledCoeff(c.name, c.float_value, scaled.get(c.name, c.scaled_int), c.bit_width)
            for c in self._items
        ]
        return CoeffSet(items, "custom")


def canonical_coeffs(variant: str = "binary") -> CoeffSet:
    """Lifting constants decoded from the binary column of the coefficient table.

    ``variant="integer"`` takes the integer-column numerators instead, which
    differ for delta (114 instead of 113) and -k (-314 instead of -315).
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    items = []
    for name in COEFF_NAMES:
        fval, bits, numerator = _TABLE[name]
        coeff = ScaledCoeff.from_binary(name, fval, bits)
        if variant == "integer":
            coeff = ScaledCoeff(name, fval, numerator, coeff.bit_width)
        items.append(coeff)
    return CoeffSet(items, variant)


def inverse_scalers(coeffs: CoeffSet) -> dict:
    """Integer rescaling words for the approximate inverse: k and -1/k, the
    negations of the -k and 1/k words."""
    nk, ik = coeffs["neg_k"], coeffs["inv_k"]
    return {
        "k": ScaledCoeff("k", -nk.float_value, -nk.scaled_int, nk.bit_width),
        "neg_inv_k": ScaledCoeff("neg_inv_k", -ik.float_value, -ik.scaled_int, ik.bit_width),
    }


def float_coeffs() -> dict:
    """Floating point lifting constants keyed by name."""
    return {name: _TABLE[name][0] for name in COEFF_NAMES}


def round_to_q8(x: float) -> int:
    """Round ``x * 256`` half away from zero; ``x`` must fit Q2.8 (``|x| < 2``)."""
    if not math.isfinite(x) or abs(x) >= 2:
        raise RangeError(f"{x} is outside the Q2.8 range (-2, 2)")
    scaled = abs(x) * SCALE
    return int(math.copysign(math.floor(scaled + 0.5), x)) if scaled else 0


@dataclass(frozen=True)
class ShiftAddPlan:
    """Signed power-of-two terms whose sum is the constant's scaled integer."""

    terms: tuple  # ((shift, sign), ...) ascending by shift
    constant: ScaledCoeff

    def __post_init__(self):
        total = sum(sign << shift for shift, sign in self.terms)
        if total != self.constant.scaled_int:
            raise ValueError(
                f"terms sum to {total}, constant is {self.constant.scaled_int}"
            )
        negatives = [shift for shift, sign in self.terms if sign < 0]
        if len(negatives) > 1 or (
            negatives and negatives[0] != self.constant.bit_width - 1
        ):
            raise ValueError("only the sign bit may contribute a negative term")

    @property
    def adders(self) -> int:
        """Adders needed to sum the partial products (no sub-expression sharing)."""
        return max(len(self.terms) - 1, 0)

    def encode(self) -> str:
        """Re-encode the terms as a two's-complement word."""
        width = self.constant.bit_width
        bits = ["0"] * width
        for shift, _ in self.terms:
            bits[width - 1 - shift] = "1"
        return "".join(bits)


def shift_add_plan(c: ScaledCoeff) -> ShiftAddPlan:
    word = c.encoding
    width = c.bit_width
    terms = []
    for shift in range(width):
        if word[width - 1 - shift] == "1":
            terms.append((shift, -1 if shift == width - 1 else 1))
    return ShiftAddPlan(tuple(terms), c)


def shared_pair(plan: ShiftAddPlan):
    """Find a two-term pattern that occurs twice among the positive terms.

    Returns ``(gap, first, second)`` where the shared sub-expression is
    ``x + (x << gap)`` and it is used shifted by ``first`` and ``second``; or
    ``None``.  Smallest gap wins, then the earliest non-overlapping pair of
    occurrences.  Sharing replaces four terms with two plus one extra adder.
    """
    positive = {shift for shift, sign in plan.terms if sign > 0}
    for gap in range(1, plan.constant.bit_width):
        starts = [s for s in sorted(positive) if s + gap in positive]
        for i, first in enumerate(starts):
            for second in starts[i + 1:]:
                if len({first, first + gap, second, second + gap}) == 4:
                    return gap, first, second
    return None


def plan_adders(plan: ShiftAddPlan, share: bool = True) -> int:
    """Adders for the multiplication itself, optionally reusing a shared pair."""
    if share and shared_pair(plan) is not None:
        return plan.adders - 1
    return plan.adders


def mul_const(x, plan: ShiftAddPlan, acc_bits: int = ACC_BITS):
    """Multiply by the plan's constant using only shifts and additions.

    Works on Python ints and on integer numpy arrays.  Raises RangeError if any
    partial sum leaves the ``acc_bits`` accumulator.
    """
    if isinstance(x, np.ndarray):
        x = x.astype(np.int64, copy=False)
    acc = 0
    lo, hi = -(1 << (acc_bits - 1)), (1 << (acc_bits - 1)) - 1
    for shift, sign in plan.terms:
        partial = x << shift
        acc = acc + partial if sign > 0 else acc - partial
        if np.any(acc < lo) or np.any(acc > hi):
            raise RangeError(
                f"product by {plan.constant.name} overflows a {acc_bits}-bit accumulator"
            )
    if isinstance(x, np.ndarray) and not isinstance(acc, np.ndarray):
        acc = np.zeros_like(x)
    return acc


def scale_q8(x):
    """Arithmetic right shift by 8 bits: floor(x / 256)."""
    return x >> FRAC_BITS
