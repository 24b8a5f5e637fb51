"""Minimal 8-bit grayscale PGM reader/writer (P2 and P5)."""

from __future__ import annotations

import os

import numpy as np

from .grid import ImageGrid


class PGMError(ValueError):
    pass


def _tokens(data: bytes, count: int, pos: int):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise PGMError("truncated PGM header")
        out.append(data[start:pos])
    return out, pos


def parse_pgm(data: bytes) -> np.ndarray:
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"unsupported image format (magic {magic!r}); expected P2 or P5 PGM")
    try:
        (w, hgt, maxval), pos = _tokens(data, 3, 2)
        width, height, maxval = int(w), int(hgt), int(maxval)
    except ValueError as exc:
        raise PGMError(f"corrupt PGM header: {exc}") from None
    if width <= 0 or height <= 0:
        raise PGMError(f"corrupt PGM header: size {width}x{height}")
    if maxval != 255:
        raise PGMError(f"only 8-bit PGM is supported (maxval 255), got maxval {maxval}")
    count = width * height
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        raw = data[pos : pos + count]
        if len(raw) != count:
            raise PGMError(f"truncated P5 raster: expected {count} bytes, got {len(raw)}")
        pixels = np.frombuffer(raw, dtype=np.uint8)
    else:
        try:
            pixels = np.array(data[pos:].split(), dtype=np.int64)
        except ValueError:
            raise PGMError("corrupt P2 raster: non-integer sample") from None
        if pixels.size != count:
            raise PGMError(f"P2 raster has {pixels.size} samples, expected {count}")
        if pixels.min() < 0 or pixels.max() > 255:
            raise PGMError("P2 sample outside [0, 255]")
    return pixels.reshape(height, width).astype(np.float64)


def load_image(path, h: float | None = None) -> ImageGrid:
    """Load an 8-bit PGM as a float grid on the unit domain.

    The grid step defaults to ``1/max(M, N)``.
    """
    with open(path, "rb") as fh:
        values = parse_pgm(fh.read())
    if h is None:
        h = 1.0 / max(values.shape)
    return ImageGrid(values, h)


def to_bytes(u: ImageGrid | np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero."""
    values = u.values if isinstance(u, ImageGrid) else np.asarray(u, dtype=np.float64)
    return np.floor(np.clip(values, 0.0, 255.0) + 0.5).astype(np.uint8)


def encode_pgm(u: ImageGrid | np.ndarray) -> bytes:
    px = to_bytes(u)
    M, N = px.shape
    return b"P5\n%d %d\n255\n" % (N, M) + px.tobytes()


def write_image(u: ImageGrid | np.ndarray, path):
    """Write ``u`` as a binary (P5) PGM."""
    data = encode_pgm(u)
    with open(os.fspath(path), "wb") as fh:
        fh.write(data)
