"""Worst-case register ranges of the fixed-point lifting datapath.

Each intermediate value is tracked as an exact affine form over the input
samples plus an interval for the accumulated floor error: ``floor(z)`` lies in
``[z - 255/256, z]`` when ``256 * z`` is an integer.  Maximising the form over
independent samples bounds the register; mirrored boundary samples only merge
coefficients, which can never exceed the independent bound.
"""

from __future__ import annotations

import math
from fractions import Fraction

from dwt97.fixpoint import SCALE, canonical_coeffs

FLOOR_SLACK = Fraction(SCALE - 1, SCALE)


class Affine:
    __slots__ = ("coef", "err_lo", "err_hi")

    def __init__(self, coef, err_lo=Fraction(0), err_hi=Fraction(0)):
        self.coef = coef
        self.err_lo = err_lo
        self.err_hi = err_hi

    @classmethod
    def sample(cls, index):
        return cls({index: Fraction(1)})

    def __add__(self, other):
        coef = dict(self.coef)
        for k, c in other.coef.items():
            coef[k] = coef.get(k, 0) + c
        return Affine(coef, self.err_lo + other.err_lo, self.err_hi + other.err_hi)

    def mul_floor(self, scaled_int):
        c = Fraction(scaled_int, SCALE)
        lo, hi = sorted((self.err_lo * c, self.err_hi * c))
        coef = {k: v * c for k, v in self.coef.items()}
        return Affine(coef, lo - FLOOR_SLACK, hi)

    def bounds(self, lo, hi):
        vmin = self.err_lo + sum(min(c * lo, c * hi) for c in self.coef.values())
        vmax = self.err_hi + sum(max(c * lo, c * hi) for c in self.coef.values())
        return math.ceil(vmin), math.floor(vmax)


def derived_ranges(coeffs=None, input_range=(-128, 127), length=32):
    """Sound declared ranges for the seven register labels."""
    coeffs = coeffs or canonical_coeffs()
    c = {k.name: k.scaled_int for k in coeffs}
    half = length // 2
    e = [Affine.sample(2 * i) for i in range(half)]
    o = [Affine.sample(2 * i + 1) for i in range(half)]
    nxt = lambda v, i: v[min(i + 1, half - 1)]
    prv = lambda v, i: v[max(i - 1, 0)]
    o1 = [o[i] + (e[i] + nxt(e, i)).mul_floor(c["alpha"]) for i in range(half)]
    e2 = [e[i] + (prv(o1, i) + o1[i]).mul_floor(c["beta"]) for i in range(half)]
    o3 = [o1[i] + (e2[i] + nxt(e2, i)).mul_floor(c["gamma"]) for i in range(half)]
    e4 = [e2[i] + (prv(o3, i) + o3[i]).mul_floor(c["delta"]) for i in range(half)]
    mid = half // 2
    lo, hi = input_range
    return {
        "input": tuple(input_range),
        "after_alpha": o1[mid].bounds(lo, hi),
        "after_beta": e2[mid].bounds(lo, hi),
        "after_gamma": o3[mid].bounds(lo, hi),
        "after_delta": e4[mid].bounds(lo, hi),
        "low": e4[mid].mul_floor(c["inv_k"]).bounds(lo, hi),
        "high": o3[mid].mul_floor(c["neg_k"]).bounds(lo, hi),
    }
