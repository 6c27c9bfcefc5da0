"""Portable graymap reading and writing.

Handles the ASCII (``P2``) and binary (``P5``) variants, header comments,
and 1- or 2-byte samples (big-endian when maxval > 255).  Pixels are
returned scaled to [0, 1] as float64.  Other raster formats should be
converted to PGM up front.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DataError, ParameterError

__all__ = ["read_pgm", "write_pgm", "block_resize"]


def _header_tokens(data: bytes, path, count: int):
    """Yield ``count`` whitespace-separated header tokens, skipping ``#``
    comments, and return the offset one byte past the last delimiter."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise DataError(f"{path}: truncated graymap header")
        byte = data[pos : pos + 1]
        if byte == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise DataError(f"{path}: unterminated comment in header")
            pos = nl + 1
        elif byte.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace() and data[end : end + 1] != b"#":
                end += 1
            tokens.append(data[pos:end])
            pos = end
            if len(tokens) == count:
                # exactly one whitespace byte separates maxval from raster
                if pos < len(data) and data[pos : pos + 1].isspace():
                    pos += 1
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    """Decode a PGM file into an (h, w) float64 array scaled to [0, 1]."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise DataError(f"{path}: cannot read file: {exc}") from exc
    if len(data) < 2:
        raise DataError(f"{path}: not a graymap file")
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise DataError(f"{path}: unsupported magic {magic!r}; expected P2 or P5")
    try:
        tokens, pos = _header_tokens(data[2:], path, 3)
        width, height, maxval = (int(t) for t in tokens)
    except (ValueError, DataError) as exc:
        raise DataError(f"{path}: malformed graymap header ({exc})") from exc
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise DataError(f"{path}: invalid graymap dimensions {width}x{height} maxval {maxval}")
    pos += 2  # account for the magic bytes

    n = width * height
    if magic == b"P5":
        bytes_per = 2 if maxval > 255 else 1
        raster = data[pos : pos + n * bytes_per]
        if len(raster) < n * bytes_per:
            raise DataError(f"{path}: raster truncated ({len(raster)} of {n * bytes_per} bytes)")
        dtype = ">u2" if bytes_per == 2 else np.uint8
        values = np.frombuffer(raster, dtype=dtype, count=n).astype(np.float64)
    else:
        try:
            values = np.array(data[pos:].split()[:n], dtype=np.float64)
        except ValueError as exc:
            raise DataError(f"{path}: non-numeric sample in ASCII raster") from exc
        if values.size < n:
            raise DataError(f"{path}: raster truncated ({values.size} of {n} samples)")
    if values.max(initial=0.0) > maxval or values.min(initial=0.0) < 0:
        raise DataError(f"{path}: sample outside [0, {maxval}]")
    return (values / maxval).reshape(height, width)


def write_pgm(path, image, maxval: int = 255, binary: bool = True):
    """Write an array of [0, 1] values as a PGM file."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ParameterError(f"image must be 2-d, got shape {img.shape}")
    if not 0 < maxval < 65536:
        raise ParameterError(f"maxval must be in [1, 65535], got {maxval}")
    quantized = np.clip(np.rint(img * maxval), 0, maxval).astype(np.uint16)
    height, width = img.shape
    header = f"{'P5' if binary else 'P2'}\n{width} {height}\n{maxval}\n"
    path = Path(path)
    if binary:
        dtype = ">u2" if maxval > 255 else np.uint8
        path.write_bytes(header.encode("ascii") + quantized.astype(dtype).tobytes())
    else:
        body = "\n".join(" ".join(str(v) for v in row) for row in quantized.tolist())
        path.write_text(header + body + "\n", encoding="ascii")


def _interval_weights(src: int, dst: int) -> np.ndarray:
    """Row-stochastic (dst, src) matrix averaging src cells into dst cells
    with area weighting; exact block means when src is divisible by dst."""
    weights = np.zeros((dst, src))
    step = src / dst
    for i in range(dst):
        lo, hi = i * step, (i + 1) * step
        for j in range(int(np.floor(lo)), min(int(np.ceil(hi)), src)):
            overlap = min(hi, j + 1) - max(lo, j)
            if overlap > 0:
                weights[i, j] = overlap
    return weights / step


def block_resize(image, shape: tuple[int, int]) -> np.ndarray:
    """Downsize (or resample) an image by area-weighted averaging."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ParameterError(f"image must be 2-d, got shape {img.shape}")
    h, w = shape
    if h <= 0 or w <= 0:
        raise ParameterError(f"target shape must be positive, got {shape}")
    return _interval_weights(img.shape[0], h) @ img @ _interval_weights(img.shape[1], w).T
