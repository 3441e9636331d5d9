"""Image quality measurement and the area / critical-path cost model."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from dwt97.dwt2d import ImagePlane, forward_lines, inverse_multi, SubbandImage
from dwt97.errors import RangeError, ShapeError
from dwt97.fixpoint import signed_width
from dwt97.lifting import fir_coeffs, fir_forward_1d, lifting_forward_1d
from dwt97.rtlsim.model import (
    DesignKind,
    PipelineModel,
    adder_width,
    build_all,
    critical_path,
    stored_bits,
)

PEAK = 255

# Logic elements per adder bit: a carry-chain adder packs one bit per LE, a
# gate-level full adder needs separate sum and carry cells.
BEHAVIORAL_ADDER_LE = 1
STRUCTURAL_ADDER_LE = 2
# Flip-flop cost; adders are the only priced resource otherwise.
REGISTER_LE = 1


class PsnrResult(NamedTuple):
    mse: float
    psnr_db: float
    method: str = ""


def _pixel_array(img):
    arr = img.to_uint8() if isinstance(img, ImagePlane) else np.asarray(img)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2D image, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > PEAK):
        raise RangeError("pixels must lie in [0, 255]")
    return arr.astype(np.float64)


def psnr(original, reconstructed, method="") -> PsnrResult:
    """PSNR of two 8-bit images (arrays of 0..255 or level-shifted ImagePlanes)."""
    a, b = _pixel_array(original), _pixel_array(reconstructed)
    if a.shape != b.shape:
        raise ShapeError(f"image shapes differ: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2)) if a.size else 0.0
    db = math.inf if mse == 0 else 10.0 * math.log10(PEAK * PEAK / mse)
    return PsnrResult(mse, db, method)


# ---------------------------------------------------------------------------
# rounding-error study

STUDY_METHODS = ("fir-float", "fir-integer", "lifting-float", "lifting-integer")
STUDY_OCTAVES = 1


def _study_transform(method, coeffs):
    """1D forward pass emitting integers, bands oriented like the lifting output."""
    if method.startswith("fir"):
        taps = fir_coeffs("float" if method == "fir-float" else "q8")

        def run(x):
            low, high = fir_forward_1d(x, taps)
            return np.rint(low), -np.rint(high)
        return run
    if method == "lifting-float":
        def run(x):
            low, high = lifting_forward_1d(x, "float")
            return np.rint(low), np.rint(high)
        return run

    def run(x):
        low, high = lifting_forward_1d(np.asarray(x, dtype=np.int64), "fixed", coeffs, input_bits=16)
        return low.astype(np.float64), high.astype(np.float64)
    return run


def rounding_error_study(tile, octaves=STUDY_OCTAVES, coeffs=None):
    """PSNR of each forward variant followed by the exact float inverse.

    Every pass rounds its outputs to integers; the FIR high band is negated to
    match the lifting sign before inversion.  ``octaves`` is reduced to what
    the tile dimensions allow.
    """
    pixels = _pixel_array(tile)
    h, w = pixels.shape
    while octaves > 0 and (w % (1 << octaves) or h % (1 << octaves)):
        octaves -= 1
    if octaves == 0:
        raise ShapeError(f"{w}x{h} tile admits no octave")
    shifted = pixels - 128.0
    rows = []
    for method in STUDY_METHODS:
        coeff_plane = forward_lines(shifted, octaves, _study_transform(method, coeffs))
        recon = inverse_multi(SubbandImage(coeff_plane, octaves, "float"), "float")
        rows.append(psnr(pixels, recon.to_uint8(), method))
    return rows


def render_study(rows) -> str:
    width = max(len(r.method) for r in rows)
    lines = [f"{'method':<{width}}  {'mse':>10}  {'psnr_db':>9}"]
    for r in rows:
        lines.append(f"{r.method:<{width}}  {r.mse:>10.4f}  {r.psnr_db:>9.3f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# cost model


def adder_le(width: int, structural: bool = False) -> int:
    return width * (STRUCTURAL_ADDER_LE if structural else BEHAVIORAL_ADDER_LE)


def area_breakdown(model: PipelineModel) -> dict:
    """LE estimate split into adders, generic multipliers and registers."""
    structural = model.kind.structural
    adders = multipliers = 0
    for node in model.nodes.values():
        if node.op == "add":
            adders += adder_le(adder_width(node, model.nodes), structural)
        elif node.op == "mul":
            # array multiplier: one operand-wide adder row per constant bit after the first
            lo, hi = model.nodes[node.terms[0].src].declared_range
            rows = node.const.bit_width - 1
            multipliers += rows * adder_le(signed_width(lo, hi))
    ages = model.readers()
    registers = sum(
        REGISTER_LE * stored_bits(model.nodes[n]) * max(ages[n], 1)
        for n in model.registered()
    )
    return {"adders": adders, "multipliers": multipliers, "registers": registers}


def area_estimate(model: PipelineModel) -> int:
    return sum(area_breakdown(model).values())


@dataclass(frozen=True)
class DesignReport:
    kind: DesignKind
    le_estimate: int
    adder_count: tuple  # adders per stage
    critical_path_adders: int
    latency: int
    max_freq_proxy: float

    @property
    def stage_count(self) -> int:
        return self.latency

    @property
    def total_adders(self) -> int:
        return sum(self.adder_count)

    @classmethod
    def of(cls, model: PipelineModel) -> "DesignReport":
        cp = critical_path(model)
        return cls(
            model.kind,
            area_estimate(model),
            tuple(s.adders for s in model.stages),
            cp,
            model.latency,
            1.0 / cp,
        )


def adders_by_step(model: PipelineModel) -> dict:
    """Adders per constant multiplication, pre-adds and final adds included."""
    names = {c.name for c in model.coeffs}
    counts = {}
    for node in model.nodes.values():
        if node.op == "add" and node.group in names:
            counts[node.group] = counts.get(node.group, 0) + 1
    return counts


_COLUMNS = ("design", "name", "les", "adders", "critical_path", "freq_proxy", "stages")


def _row(r: DesignReport):
    return (str(int(r.kind)), r.kind.name, str(r.le_estimate), str(r.total_adders),
            str(r.critical_path_adders), f"{r.max_freq_proxy:.3f}", str(r.latency))


def render_table(reports) -> str:
    rows = [_COLUMNS] + [_row(r) for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(_COLUMNS))]
    lines = []
    for row in rows:
        cells = [c.ljust(w) if i == 1 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def render_keyvalue(reports) -> str:
    lines = []
    for r in reports:
        prefix = f"design{int(r.kind)}"
        for key, value in zip(_COLUMNS[1:], _row(r)[1:]):
            lines.append(f"{prefix}.{key}={value}")
        lines.append(f"{prefix}.adders_per_stage={','.join(map(str, r.adder_count))}")
    return "\n".join(lines) + "\n"


def tradeoff_report(models=None, coeffs=None, ranges=None):
    """Reports for every design plus the aligned table and key=value text."""
    models = build_all(coeffs, ranges) if models is None else models
    reports = [DesignReport.of(m) for m in models]
    return reports, render_table(reports), render_keyvalue(reports)
