"""Multi-octave 2D transform driven by an image-sized memory and its address control.

Each octave runs a rows pass then a columns pass over the active region (the
previous octave's LL quadrant).  The memory controller reads one whole line
into a line buffer, the 1D datapath transforms it, and the result is written
back in place with the low band in the first half of the line and the high
band in the second half.  After both passes the quadrants are LL top-left, HL
top-right, LH bottom-left and HH bottom-right.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from dwt97.errors import RangeError, ShapeError
from dwt97.lifting import lifting_forward_1d, lifting_inverse_1d

MAX_AUTO_OCTAVES = 5
# column passes and deeper octaves see coefficients wider than a byte
WIDE_INPUT_BITS = 16


@dataclass
class ImagePlane:
    pixels: np.ndarray  # (height, width), level-shifted

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels)
        if self.pixels.ndim != 2:
            raise ShapeError(f"image plane must be 2D, got shape {self.pixels.shape}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.pixels if dtype is None else self.pixels.astype(dtype)

    @classmethod
    def from_uint8(cls, data) -> "ImagePlane":
        """Shift 8-bit pixels into the signed range [-128, 127]."""
        data = np.asarray(data)
        if data.size and (data.min() < 0 or data.max() > 255):
            raise RangeError("8-bit pixels must lie in [0, 255]")
        return cls(data.astype(np.int64) - 128)

    def to_uint8(self) -> np.ndarray:
        """Undo the level shift, rounding and clamping to [0, 255]."""
        return np.clip(np.rint(self.pixels + 128.0), 0, 255).astype(np.uint8)


class Octave(NamedTuple):
    ll: np.ndarray
    lh: np.ndarray  # horizontal low, vertical high
    hl: np.ndarray  # horizontal high, vertical low
    hh: np.ndarray


def _pixels(img):
    arr = img.pixels if isinstance(img, ImagePlane) else np.asarray(img)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2D plane, got shape {arr.shape}")
    return arr


def _check_even(h, w):
    if h < 2 or w < 2 or h % 2 or w % 2:
        raise ShapeError(f"octave input must have even dimensions >= 2, got {w}x{h}")


def forward_octave(img, mode="float", coeffs=None) -> Octave:
    """Rows then columns of one octave; every output plane is (h/2, w/2)."""
    x = _pixels(img)
    _check_even(*x.shape)
    bits = WIDE_INPUT_BITS
    low, high = lifting_forward_1d(x, mode, coeffs, input_bits=bits)
    ll, lh = lifting_forward_1d(low.T, mode, coeffs, input_bits=bits)
    hl, hh = lifting_forward_1d(high.T, mode, coeffs, input_bits=bits)
    return Octave(ll.T, lh.T, hl.T, hh.T)


def inverse_octave(planes, mode="float", coeffs=None) -> ImagePlane:
    """Inverse columns then inverse rows."""
    ll, lh, hl, hh = (np.asarray(p) for p in planes)
    if not (ll.shape == lh.shape == hl.shape == hh.shape) or ll.ndim != 2:
        raise ShapeError("the four sub-band planes must share one 2D shape")
    low = lifting_inverse_1d((ll.T, lh.T), mode, coeffs).T
    high = lifting_inverse_1d((hl.T, hh.T), mode, coeffs).T
    return ImagePlane(lifting_inverse_1d((low, high), mode, coeffs))


def default_octaves(width: int, height: int) -> int:
    """Deepest octave count with both dimensions divisible by 2**d, capped at 5."""
    d = 0
    while d < MAX_AUTO_OCTAVES and width % (2 << d) == 0 and height % (2 << d) == 0:
        d += 1
    return d


def _check_octaves(width, height, octaves):
    if octaves < 1:
        raise ShapeError("at least one octave is required")
    if width % (1 << octaves) or height % (1 << octaves):
        raise ShapeError(f"{width}x{height} is not divisible by 2**{octaves}")


# ---------------------------------------------------------------------------
# memory and memory control


class LineAccess(NamedTuple):
    reads: tuple
    writes: tuple  # low-band addresses then high-band addresses


def address_schedule(w: int, h: int, octave: int, pass_: str):
    """Per-line read/write addresses of one pass over the active region."""
    if octave < 1:
        raise ShapeError("octaves are numbered from 1")
    _check_octaves(w, h, octave)
    aw, ah = w >> (octave - 1), h >> (octave - 1)
    schedule = []
    if pass_ == "rows":
        for y in range(ah):
            line = tuple(y * w + x for x in range(aw))
            schedule.append(LineAccess(line, line[: aw // 2] + line[aw // 2:]))
    elif pass_ == "columns":
        for x in range(aw):
            line = tuple(y * w + x for y in range(ah))
            schedule.append(LineAccess(line, line[: ah // 2] + line[ah // 2:]))
    else:
        raise ValueError(f"pass must be 'rows' or 'columns', got {pass_!r}")
    return schedule


@dataclass
class MemoryModel:
    """Image-sized word memory with an optional access log.

    The log holds ``(cycle, kind, address, pass_index)`` with one access per
    cycle; ``kind`` is ``"r"`` or ``"w"``.
    """

    size: int
    dtype: object = np.int64
    log_accesses: bool = False
    cells: np.ndarray = field(init=False)
    access_log: list = field(default_factory=list)
    cycle: int = 0
    pass_index: int = 0

    def __post_init__(self):
        self.cells = np.zeros(self.size, dtype=self.dtype)

    def _touch(self, kind, addresses):
        addresses = np.asarray(addresses, dtype=np.int64)
        if addresses.size and (addresses.min() < 0 or addresses.max() >= self.size):
            raise RangeError(f"address outside a {self.size}-word memory")
        if self.log_accesses:
            for a in addresses.tolist():
                self.access_log.append((self.cycle, kind, a, self.pass_index))
                self.cycle += 1
        else:
            self.cycle += addresses.size
        return addresses

    def read(self, addresses) -> np.ndarray:
        return self.cells[self._touch("r", addresses)].copy()

    def write(self, addresses, values):
        addresses = self._touch("w", addresses)
        values = np.asarray(values)
        if values.shape != addresses.shape:
            raise ShapeError("one value per written address")
        self.cells[addresses] = values

    def begin_pass(self):
        self.pass_index += 1


def find_hazards(access_log):
    """Reads of a cell that was already overwritten earlier in the same pass."""
    written = {}
    hazards = []
    for cycle, kind, address, pass_index in access_log:
        seen = written.setdefault(pass_index, set())
        if kind == "w":
            seen.add(address)
        elif address in seen:
            hazards.append((cycle, address, pass_index))
    return hazards


@dataclass
class SubbandImage:
    """Coefficients in quadrant layout inside an image-sized buffer."""

    data: np.ndarray  # (height, width)
    octaves: int
    mode: str = "float"

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def active(self, octave: int):
        return self.width >> (octave - 1), self.height >> (octave - 1)

    def bands(self, octave: int) -> Octave:
        """Views of one octave's quadrants; the LL view of an octave other
        than the deepest holds the further-decomposed coefficients."""
        if not 1 <= octave <= self.octaves:
            raise ShapeError(f"octave {octave} outside 1..{self.octaves}")
        aw, ah = self.active(octave)
        hw, hh = aw // 2, ah // 2
        d = self.data
        return Octave(d[:hh, :hw], d[hh:ah, :hw], d[:hh, hw:aw], d[hh:ah, hw:aw])

    @property
    def ll(self) -> np.ndarray:
        return self.bands(self.octaves).ll

    def planes(self):
        """Deepest LL followed by (octave, LH, HL, HH) for every octave."""
        out = {"LL": self.ll}
        for o in range(1, self.octaves + 1):
            b = self.bands(o)
            out[f"LH{o}"], out[f"HL{o}"], out[f"HH{o}"] = b.lh, b.hl, b.hh
        return out


def forward_multi(img, octaves=None, mode="float", coeffs=None, memory=None) -> SubbandImage:
    """Multi-octave forward transform executed through the memory controller.

    ``octaves=None`` picks ``default_octaves``.  Pass a MemoryModel with
    ``log_accesses=True`` to record the access trace.
    """
    x = _pixels(img)
    h, w = x.shape
    octaves = default_octaves(w, h) if octaves is None else octaves
    _check_octaves(w, h, octaves)
    dtype = np.float64 if mode == "float" else np.int64
    if memory is None:
        memory = MemoryModel(w * h, dtype)
    elif memory.size != w * h:
        raise ShapeError("memory must be exactly image-sized")
    memory.cells = memory.cells.astype(dtype)
    memory.write(np.arange(w * h), x.reshape(-1).astype(dtype))
    for octave in range(1, octaves + 1):
        for pass_ in ("rows", "columns"):
            memory.begin_pass()
            for access in address_schedule(w, h, octave, pass_):
                line = memory.read(access.reads)  # line buffer
                low, high = lifting_forward_1d(line, mode, coeffs, input_bits=WIDE_INPUT_BITS)
                memory.write(access.writes, np.concatenate([low, high]))
    return SubbandImage(memory.cells.reshape(h, w).copy(), octaves, mode)


def inverse_multi(sub: SubbandImage, mode="float", coeffs=None) -> ImagePlane:
    data = np.array(sub.data, dtype=np.float64 if mode == "float" else np.int64)
    for octave in range(sub.octaves, 0, -1):
        aw, ah = sub.width >> (octave - 1), sub.height >> (octave - 1)
        hw, hh = aw // 2, ah // 2
        region = data[:ah, :aw]
        planes = (region[:hh, :hw], region[hh:, :hw], region[:hh, hw:], region[hh:, hw:])
        data[:ah, :aw] = inverse_octave(planes, mode, coeffs).pixels
    return ImagePlane(data)


def forward_lines(x, octaves, transform):
    """Array-level multi-octave forward transform with a custom 1D transform.

    ``transform(lines) -> (low, high)`` acts on the last axis; it is applied to
    the rows then the columns of each octave's active region.
    """
    data = np.array(x)
    h, w = data.shape
    _check_octaves(w, h, octaves)
    for octave in range(1, octaves + 1):
        aw, ah = w >> (octave - 1), h >> (octave - 1)
        low, high = transform(data[:ah, :aw])
        data = data.astype(np.result_type(data, low))
        data[:ah, :aw] = np.concatenate([low, high], axis=1)
        low, high = transform(data[:ah, :aw].T)
        data[:ah, :aw] = np.concatenate([low, high], axis=1).T
    return data


# ---------------------------------------------------------------------------
# coefficient dump

DUMP_MAGIC = b"D97C"
_HEADER = struct.Struct("<4sHHBB")
_MODE_CODES = {"float": 0, "fixed": 1}


def dump_coefficients(sub: SubbandImage) -> bytes:
    """Header (magic, width, height, octaves, mode) then row-major signed
    16-bit little-endian coefficients in quadrant layout.  Float coefficients
    are rounded to the nearest integer, ties to even."""
    values = np.rint(sub.data) if sub.mode == "float" else np.asarray(sub.data)
    if values.size and (values.min() < -32768 or values.max() > 32767):
        raise RangeError("coefficient outside the signed 16-bit dump range")
    header = _HEADER.pack(DUMP_MAGIC, sub.width, sub.height, sub.octaves, _MODE_CODES[sub.mode])
    return header + values.astype("<i2").tobytes()


def load_coefficients(blob: bytes) -> SubbandImage:
    if len(blob) < _HEADER.size:
        raise ShapeError("coefficient dump shorter than its header")
    magic, w, h, octaves, code = _HEADER.unpack_from(blob)
    if magic != DUMP_MAGIC:
        raise ValueError(f"bad coefficient dump magic {magic!r}")
    mode = {v: k for k, v in _MODE_CODES.items()}.get(code)
    if mode is None:
        raise ValueError(f"unknown mode code {code}")
    body = blob[_HEADER.size:]
    if len(body) != 2 * w * h:
        raise ShapeError(f"expected {2 * w * h} coefficient bytes, got {len(body)}")
    data = np.frombuffer(body, dtype="<i2").astype(np.int64).reshape(h, w)
    return SubbandImage(data, octaves, mode)
