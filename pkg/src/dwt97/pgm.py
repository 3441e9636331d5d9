"""Binary PGM (P5) reading and writing, 8-bit depth only."""

from __future__ import annotations

import os

import numpy as np

from dwt97.dwt2d import ImagePlane
from dwt97.errors import PgmError

_WHITESPACE = b" \t\n\r\v\f"


def _header_fields(data: bytes):
    """Yield (token, offset) for the magic, width, height and maxval, then
    the payload offset (the single whitespace byte after maxval is skipped)."""
    pos, tokens = 0, []
    while len(tokens) < 4:
        while pos < len(data) and (data[pos] in _WHITESPACE or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < len(data) and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        if pos >= len(data):
            raise PgmError("header ends early", pos)
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        tokens.append((data[start:pos], start))
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise PgmError("missing whitespace after maxval", pos)
    return tokens, pos + 1


def _number(token, offset, what):
    if not token.isdigit():
        raise PgmError(f"{what} is not a decimal number: {token!r}", offset)
    return int(token)


def parse_pgm(data: bytes) -> np.ndarray:
    """Raw pixel array (height, width) of uint8 from P5 bytes."""
    tokens, start = _header_fields(data)
    (magic, moff), (wt, woff), (ht, hoff), (mt, moff2) = tokens
    if magic != b"P5":
        raise PgmError(f"not a binary PGM (magic {magic!r})", moff)
    width = _number(wt, woff, "width")
    height = _number(ht, hoff, "height")
    maxval = _number(mt, moff2, "maxval")
    if width < 1 or height < 1:
        raise PgmError("image dimensions must be positive", woff)
    if not 1 <= maxval <= 255:
        raise PgmError(f"unsupported depth: maxval {maxval} (8-bit only)", moff2)
    need = width * height
    have = len(data) - start
    if have < need:
        raise PgmError(f"truncated payload: {need - have} bytes missing", len(data))
    pixels = np.frombuffer(data, dtype=np.uint8, count=need, offset=start).reshape(height, width)
    if pixels.max() > maxval:
        bad = int(np.argmax(pixels.reshape(-1) > maxval))
        raise PgmError(f"pixel exceeds maxval {maxval}", start + bad)
    return pixels.copy()


def read_pgm(path) -> ImagePlane:
    """Load a P5 file as a level-shifted plane."""
    with open(path, "rb") as f:
        return ImagePlane.from_uint8(parse_pgm(f.read()))


def encode_pgm(pixels, maxval=255) -> bytes:
    arr = np.asarray(pixels)
    if arr.ndim != 2:
        raise ValueError(f"PGM needs a 2D image, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > maxval):
        raise ValueError(f"pixels outside [0, {maxval}]")
    h, w = arr.shape
    return f"P5\n{w} {h}\n{maxval}\n".encode("ascii") + arr.astype(np.uint8).tobytes()


def write_pgm(path, image, maxval=255):
    """Write an ImagePlane (level shift undone) or an array of 0..maxval pixels."""
    pixels = image.to_uint8() if isinstance(image, ImagePlane) else image
    blob = encode_pgm(pixels, maxval)
    with open(os.fspath(path), "wb") as f:
        f.write(blob)
