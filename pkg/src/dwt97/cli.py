"""Command-line front end.

    dwt97 transform --in img.pgm --out coeffs.d97 [--mode fixed] [--octaves auto]
    dwt97 roundtrip --in img.pgm --out recon.pgm [--mode float]
    dwt97 simulate  [--in img.pgm] --design 3 [--trace trace.txt]
    dwt97 study     --in tile.pgm
    dwt97 report    [--format table|kv]
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from dwt97 import __version__
from dwt97.dwt2d import ImagePlane, dump_coefficients, forward_multi, inverse_multi
from dwt97.fixpoint import VARIANTS, canonical_coeffs
from dwt97.lifting import lifting_forward_1d
from dwt97.metrics import STUDY_OCTAVES, psnr, render_study, rounding_error_study, tradeoff_report
from dwt97.pgm import read_pgm, write_pgm
from dwt97.rtlsim.bounds import derived_ranges
from dwt97.rtlsim.model import PUBLISHED_RANGES, build_all, build_design
from dwt97.rtlsim.sim import GUARD_PAIRS, run_stream

COMMANDS = ("transform", "roundtrip", "simulate", "study", "report")
DEFAULT_SEED = 1
SIM_IMAGE_SIZE = 64


@dataclass
class CliConfig:
    command: str
    input_path: str | None = None
    output_path: str | None = None
    design: int = 1
    mode: str = "float"
    octaves: int | None = None  # None: deepest the image allows
    coeff_variant: str = "binary"
    seed: int = DEFAULT_SEED
    trace_path: str | None = None
    ranges: str = "derived"
    fmt: str = "table"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.design not in range(1, 6):
            raise ValueError(f"design must be 1..5, got {self.design}")
        if self.mode not in ("float", "fixed"):
            raise ValueError(f"mode must be float or fixed, got {self.mode!r}")
        if self.coeff_variant not in VARIANTS:
            raise ValueError(f"coefficient variant must be one of {VARIANTS}")
        if self.octaves is not None and self.octaves < 1:
            raise ValueError("octaves must be positive or auto")
        if self.command in ("transform", "roundtrip", "study") and not self.input_path:
            raise ValueError(f"{self.command} needs --in")
        if self.command in ("transform", "roundtrip") and not self.output_path:
            raise ValueError(f"{self.command} needs --out")

    @property
    def coeffs(self):
        return canonical_coeffs(self.coeff_variant)

    def range_table(self):
        return dict(PUBLISHED_RANGES) if self.ranges == "published" else derived_ranges(self.coeffs)


def _octaves(value: str):
    if value == "auto":
        return None
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a count or 'auto', got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dwt97", description="Fixed-point 9/7 lifting DWT tools")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--in", dest="input_path", help="input PGM (P5)")
    p.add_argument("--out", dest="output_path", help="output file (stdout for reports when absent)")
    p.add_argument("--design", type=int, default=1, choices=range(1, 6))
    p.add_argument("--mode", default="float", choices=("float", "fixed"))
    p.add_argument("--octaves", type=_octaves, default=None, help="count or 'auto'")
    p.add_argument("--coeffs", dest="coeff_variant", default="binary", choices=VARIANTS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trace", dest="trace_path", help="register trace of the first streamed row")
    p.add_argument("--ranges", default="derived", choices=("derived", "published"),
                   help="declared register ranges for simulate/report")
    p.add_argument("--format", dest="fmt", default="table", choices=("table", "kv"))
    return p


def _emit(cfg: CliConfig, text: str, out):
    if cfg.output_path and cfg.command in ("simulate", "study", "report"):
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        out.write(text)


def _transform(cfg, out):
    img = read_pgm(cfg.input_path)
    sub = forward_multi(img, cfg.octaves, cfg.mode, cfg.coeffs)
    with open(cfg.output_path, "wb") as f:
        f.write(dump_coefficients(sub))
    out.write(f"octaves={sub.octaves} mode={sub.mode} size={sub.width}x{sub.height}\n")


def _roundtrip(cfg, out):
    img = read_pgm(cfg.input_path)
    sub = forward_multi(img, cfg.octaves, cfg.mode, cfg.coeffs)
    recon = ImagePlane(inverse_multi(sub, "float").pixels)
    write_pgm(cfg.output_path, recon)
    result = psnr(img, recon, f"{cfg.mode}-roundtrip")
    out.write(f"octaves={sub.octaves} mode={cfg.mode} mse={result.mse:.6g} psnr_db={result.psnr_db:.3f}\n")


def _simulate(cfg, out):
    if cfg.input_path:
        rows = read_pgm(cfg.input_path).pixels
    else:
        rng = np.random.default_rng(cfg.seed)
        rows = rng.integers(-128, 128, size=(SIM_IMAGE_SIZE, SIM_IMAGE_SIZE))
    if rows.shape[1] % 2:
        raise ValueError(f"rows must have even length, got {rows.shape[1]}")
    model = build_design(cfg.design, cfg.coeffs, cfg.range_table())
    if cfg.trace_path:
        with open(cfg.trace_path, "w", encoding="utf-8", newline="\n") as trace:
            model.trace = trace
            run_stream(model, rows[0], engine="cycle")
            model.trace = None
    bands = run_stream(model, rows, engine="batch")
    oracle = lifting_forward_1d(rows, "fixed", cfg.coeffs)
    match = np.array_equal(bands.low, oracle.low) and np.array_equal(bands.high, oracle.high)
    pairs = rows.shape[1] // 2 + 2 * GUARD_PAIRS
    text = (
        f"design={cfg.design} name={model.kind.name} latency={model.latency} "
        f"rows={rows.shape[0]} pairs_per_row={pairs} cycles_per_row={pairs + model.latency} "
        f"total_cycles={rows.shape[0] * (pairs + model.latency)} "
        f"oracle_match={'yes' if match else 'no'}\n"
    )
    _emit(cfg, text, out)
    if not match:
        raise RuntimeError("pipeline output differs from the fixed-point oracle")


def _study(cfg, out):
    img = read_pgm(cfg.input_path)
    rows = rounding_error_study(img, cfg.octaves or STUDY_OCTAVES, cfg.coeffs)
    _emit(cfg, render_study(rows), out)


def _report(cfg, out):
    models = build_all(cfg.coeffs, cfg.range_table())
    _, table, kv = tradeoff_report(models)
    _emit(cfg, table if cfg.fmt == "table" else kv, out)


_HANDLERS = {
    "transform": _transform,
    "roundtrip": _roundtrip,
    "simulate": _simulate,
    "study": _study,
    "report": _report,
}


def run(cfg: CliConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        _HANDLERS[cfg.command](cfg, out)
    except (ValueError, OSError, RuntimeError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"dwt97 {cfg.command}: {msg}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = CliConfig(**vars(args))
    except ValueError as exc:
        print(f"dwt97: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
