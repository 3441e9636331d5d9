"""Gate-level two's-complement arithmetic built from one-bit full adders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dwt97.fixpoint import fits_signed


def full_adder(a: int, b: int, cin: int):
    """One-bit full adder: returns (sum, carry)."""
    for bit in (a, b, cin):
        if bit not in (0, 1):
            raise ValueError(f"full adder inputs are single bits, got {bit!r}")
    s = a ^ b ^ cin
    carry = (a & b) | (a & cin) | (b & cin)
    return s, carry


@dataclass(frozen=True)
class Word:
    """A two's-complement word: ``value`` held in ``width`` bits."""

    value: int
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("word width must be positive")
        if not fits_signed(self.value, self.width):
            raise ValueError(f"{self.value} does not fit in {self.width} bits")

    def bits(self, width=None):
        """Bits LSB first, sign-extended (MSB replicated) to ``width``."""
        width = self.width if width is None else width
        if width < self.width:
            raise ValueError("cannot narrow a word by sign extension")
        return [(self.value >> i) & 1 for i in range(width)]

    @classmethod
    def from_bits(cls, bits) -> "Word":
        value = sum(bit << i for i, bit in enumerate(bits))
        if bits[-1]:
            value -= 1 << len(bits)
        return cls(value, len(bits))


def ripple_add(a: Word, b: Word, *, subtract: bool = False) -> Word:
    """Add (or subtract) two words with a chain of full adders.

    Both operands are sign-extended to ``max(n, m) + 1`` bits, so the result
    never overflows.  Subtraction inverts ``b`` and feeds a carry-in of one.
    """
    width = max(a.width, b.width) + 1
    abits = a.bits(width)
    bbits = b.bits(width)
    carry = 0
    if subtract:
        bbits = [1 - bit for bit in bbits]
        carry = 1
    out = []
    for x, y in zip(abits, bbits):
        s, carry = full_adder(x, y, carry)
        out.append(s)
    return Word.from_bits(out)


def ripple_add_array(a, b, width: int, *, subtract: bool = False) -> np.ndarray:
    """Element-wise ripple-carry addition of integer arrays whose values fit in
    ``width`` bits; the chain is ``width + 1`` full adders long."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n = width + 1
    carry = np.full(np.broadcast(a, b).shape, subtract, dtype=bool)
    result = np.zeros(carry.shape, dtype=np.int64)
    for i in range(n):
        # arithmetic shift replicates the sign bit above the word
        x = ((a >> i) & 1).astype(bool)
        y = ((b >> i) & 1).astype(bool)
        if subtract:
            y = ~y
        p = x ^ y
        s = p ^ carry
        carry = (x & y) | (p & carry)
        result |= s.astype(np.int64) << i
    # reinterpret the n-bit pattern as signed
    sign = (result >> (n - 1)) & 1
    return result - (sign << n)
