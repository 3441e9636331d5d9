"""One-dimensional 9/7 transforms: lifting (float and fixed point) and FIR reference.

All transforms act along the last axis, so a 2D array is treated as a stack of
independent signals.  Even-indexed samples form the low-pass dataflow and
odd-indexed samples the high-pass dataflow.  Boundaries use whole-sample
symmetric extension.

Band convention: the lifting low band equals the FIR low band; the lifting
high band is the FIR high band negated, because the odd path is scaled by -k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from dwt97.errors import RangeError, ShapeError
from dwt97.fixpoint import (
    CoeffSet,
    canonical_coeffs,
    float_coeffs,
    inverse_scalers,
    mul_const,
    round_to_q8,
    scale_q8,
    shift_add_plan,
)

MODES = ("float", "fixed")

INPUT_RANGE = (-128, 127)

# JPEG2000 Part 1 irreversible 9/7 analysis filters (ITU-T T.800, Table F.4),
# listed from the centre tap outwards.
LOWPASS_TAPS = (
    0.6029490182363579,
    0.2668641184428723,
    -0.07822326652898785,
    -0.01686411844287495,
    0.02674875741080976,
)
HIGHPASS_TAPS = (
    1.115087052456994,
    -0.5912717631142470,
    -0.05754352622849957,
    0.09127176311424948,
)


class BandPair(NamedTuple):
    low: np.ndarray
    high: np.ndarray


def as_signal(s, dtype=None) -> np.ndarray:
    arr = np.asarray(s, dtype=dtype)
    if arr.ndim == 0:
        raise ShapeError("signal must have at least one axis")
    n = arr.shape[-1]
    if n < 2 or n % 2:
        raise ShapeError(f"signal length must be even and >= 2, got {n}")
    return arr


def mirror_index(i, n: int):
    """Map (possibly out-of-range) indices onto [0, n) by whole-sample mirroring."""
    i = np.asarray(i)
    if n == 1:
        return np.zeros_like(i)
    period = 2 * (n - 1)
    i = np.mod(i, period)
    return np.where(i < n, i, period - i)


def symmetric_extend(s, left: int, right: int) -> np.ndarray:
    """Whole-sample symmetric extension: [a,b,c,d] with 2, 2 gives [c,b,a,b,c,d,c,b]."""
    arr = np.asarray(s)
    n = arr.shape[-1]
    if left < 0 or right < 0:
        raise RangeError("extension lengths must be non-negative")
    if left >= n or right >= n:
        raise RangeError(f"cannot extend a length-{n} signal by ({left}, {right})")
    idx = mirror_index(np.arange(-left, n + right), n)
    return arr[..., idx]


def _next(v):
    # v[n+1], mirrored at the right edge
    return np.concatenate([v[..., 1:], v[..., -1:]], axis=-1)


def _prev(v):
    # v[n-1], mirrored at the left edge
    return np.concatenate([v[..., :1], v[..., :-1]], axis=-1)


def _fixed_mul(coeffs: CoeffSet, acc_bits: int):
    plans = {c.name: shift_add_plan(c) for c in coeffs}

    def mul(name, v):
        return scale_q8(mul_const(v, plans[name], acc_bits))

    return mul


def _check_fixed_input(arr, input_bits):
    lo, hi = -(1 << (input_bits - 1)), (1 << (input_bits - 1)) - 1
    if arr.size and (arr.min() < lo or arr.max() > hi):
        raise RangeError(f"fixed-mode samples must lie in [{lo}, {hi}]")


def _fixed_ints(s):
    arr = np.asarray(s)
    if arr.dtype.kind == "f":
        if not np.all(arr == np.round(arr)):
            raise RangeError("fixed-mode samples must be integers")
    elif arr.dtype.kind not in "iub":
        raise RangeError("fixed-mode samples must be integers")
    return arr.astype(np.int64)


def lifting_forward_1d(s, mode="float", coeffs=None, input_bits=8) -> BandPair:
    """Forward lifting transform: alpha predict, beta update, gamma predict,
    delta update, then low = even * 1/k and high = odd * -k.

    In fixed mode every constant product is a shift-add multiplication followed
    by an 8-bit floor shift; ``input_bits`` bounds the accepted sample range
    (8 for the hardware datapath; wider for later 2D passes).
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    s = as_signal(s)
    if mode == "fixed":
        x = _fixed_ints(s)
        _check_fixed_input(x, input_bits)
        mul = _fixed_mul(coeffs or canonical_coeffs(), input_bits + 14)
    else:
        x = s.astype(np.float64)
        k = float_coeffs()

        def mul(name, v):
            return k[name] * v

    e, o = x[..., 0::2], x[..., 1::2]
    o1 = o + mul("alpha", e + _next(e))
    e2 = e + mul("beta", _prev(o1) + o1)
    o3 = o1 + mul("gamma", e2 + _next(e2))
    e4 = e2 + mul("delta", _prev(o3) + o3)
    return BandPair(mul("inv_k", e4), mul("neg_k", o3))


def lifting_inverse_1d(b, mode="float", coeffs=None, input_bits=16) -> np.ndarray:
    """Undo the lifting steps in reverse order with their signs flipped.

    Float mode divides by the forward scaling constants, so it reconstructs the
    float forward transform's input up to rounding noise.  Fixed mode rescales
    by k = 315/256 and -1/k = -208/256 (the magnitudes of the -k and 1/k words)
    and runs the mirrored integer steps; it only approximates the inverse.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    low, high = (np.asarray(v) for v in b)
    if low.shape != high.shape or low.ndim == 0 or low.shape[-1] < 1:
        raise ShapeError(f"band shapes differ or are empty: {low.shape} vs {high.shape}")
    if mode == "fixed":
        low, high = _fixed_ints(low), _fixed_ints(high)
        coeffs = coeffs or canonical_coeffs()
        mul = _fixed_mul(coeffs, input_bits + 14)
        inv_plans = {n: shift_add_plan(c) for n, c in inverse_scalers(coeffs).items()}
        e4 = scale_q8(mul_const(low, inv_plans["k"], input_bits + 14))
        o3 = scale_q8(mul_const(high, inv_plans["neg_inv_k"], input_bits + 14))
    else:
        k = float_coeffs()
        low, high = low.astype(np.float64), high.astype(np.float64)

        def mul(name, v):
            return k[name] * v

        e4 = low / k["inv_k"]
        o3 = high / k["neg_k"]
    e2 = e4 - mul("delta", _prev(o3) + o3)
    o1 = o3 - mul("gamma", e2 + _next(e2))
    e = e2 - mul("beta", _prev(o1) + o1)
    o = o1 - mul("alpha", e + _next(e))
    out = np.empty(low.shape[:-1] + (2 * low.shape[-1],), dtype=e.dtype)
    out[..., 0::2] = e
    out[..., 1::2] = o
    return out


@dataclass(frozen=True)
class FirCoeffs:
    lowpass: tuple  # 9 taps
    highpass: tuple  # 7 taps
    mode: str = "float"

    def __post_init__(self):
        if len(self.lowpass) != 9 or len(self.highpass) != 7:
            raise ShapeError("9/7 filters need 9 low-pass and 7 high-pass taps")
        for taps in (self.lowpass, self.highpass):
            if tuple(taps) != tuple(reversed(taps)):
                raise ValueError("9/7 filters are symmetric about the centre tap")
        if self.mode not in ("float", "q8"):
            raise ValueError("mode must be 'float' or 'q8'")


def _full(half):
    return tuple(reversed(half[1:])) + tuple(half)


def fir_coeffs(mode="float") -> FirCoeffs:
    """9/7 analysis filters; ``mode="q8"`` rounds every tap to Q2.8 integers."""
    low, high = _full(LOWPASS_TAPS), _full(HIGHPASS_TAPS)
    if mode == "q8":
        low = tuple(round_to_q8(t) for t in low)
        high = tuple(round_to_q8(t) for t in high)
    elif mode != "float":
        raise ValueError("mode must be 'float' or 'q8'")
    return FirCoeffs(low, high, mode)


def fir_forward_1d(s, coeffs: FirCoeffs | None = None) -> BandPair:
    """Direct 9/7 filtering with downsampling: the low band is centred on even
    samples, the high band on odd samples."""
    coeffs = coeffs or fir_coeffs()
    s = as_signal(s)
    n = s.shape[-1]
    half = n // 2
    if coeffs.mode == "q8":
        x = _fixed_ints(s)
    else:
        x = s.astype(np.float64)
    centres_low = 2 * np.arange(half)
    centres_high = centres_low + 1
    low = 0
    for j, tap in enumerate(coeffs.lowpass):
        low = low + tap * x[..., mirror_index(centres_low + j - 4, n)]
    high = 0
    for j, tap in enumerate(coeffs.highpass):
        high = high + tap * x[..., mirror_index(centres_high + j - 3, n)]
    if coeffs.mode == "q8":
        low, high = scale_q8(low), scale_q8(high)
    return BandPair(np.asarray(low), np.asarray(high))
