"""Binary tensor files and simple image / table exporters.

PATT layout (all integers little-endian)::

    b"PATT" | version u8 | dtype u8 (0 = f32, 1 = f64) | ndim u8 | ndim x u32 dims | payload

The payload is the row-major element sequence in the stated precision.
"""

import logging
import os
import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np
import pandas as pd

from patkit.exceptions import FormatError, NumericError, SizeError

logger = logging.getLogger(__name__)

MAGIC = b"PATT"
VERSION = 1
_DTYPES: dict[int, np.dtype] = {0: np.dtype('<f4'), 1: np.dtype('<f8')}
_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}
_U32_MAX = 2 ** 32 - 1
_HEADER = struct.Struct('<4sBBB')


def encode_tensor(tensor: np.ndarray) -> bytes:
    array = np.asarray(tensor)
    if array.dtype not in _CODES:
        raise FormatError(f"Unsupported tensor dtype {array.dtype}; use float32 or float64")
    if array.ndim > 255:
        raise SizeError(f"Tensor rank {array.ndim} does not fit the header")
    if any(dim > _U32_MAX for dim in array.shape):
        raise SizeError(f"Tensor dims {array.shape} overflow 32-bit fields")
    if not np.all(np.isfinite(array)):
        raise NumericError("tensor written to disk")
    code = _CODES[array.dtype]
    header = _HEADER.pack(MAGIC, VERSION, code, array.ndim)
    dims = struct.pack(f'<{array.ndim}I', *array.shape)
    payload = np.ascontiguousarray(array, dtype=_DTYPES[code]).tobytes()
    return header + dims + payload


def decode_tensor(buffer: bytes | memoryview, offset: int = 0) -> tuple[np.ndarray, int]:
    """Decode one tensor starting at ``offset``; return it with the offset just past it."""
    view = memoryview(buffer)
    if len(view) - offset < _HEADER.size:
        raise FormatError("Truncated tensor header")
    magic, version, code, ndim = _HEADER.unpack_from(view, offset)
    if magic != MAGIC:
        raise FormatError(f"Bad magic {bytes(magic)!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"Unsupported tensor file version {version}")
    if code not in _DTYPES:
        raise FormatError(f"Unknown dtype code {code}")
    offset += _HEADER.size
    if len(view) - offset < 4 * ndim:
        raise FormatError("Truncated tensor dimensions")
    shape = struct.unpack_from(f'<{ndim}I', view, offset)
    offset += 4 * ndim
    dtype = _DTYPES[code]
    count = int(np.prod(shape, dtype=np.int64)) if ndim else 1
    nbytes = count * dtype.itemsize
    if len(view) - offset < nbytes:
        raise FormatError(
            f"Truncated tensor payload: expected {nbytes} bytes, found {len(view) - offset}"
        )
    array = np.frombuffer(view, dtype=dtype, count=count, offset=offset).reshape(shape)
    return array.astype(dtype.newbyteorder('='), copy=True), offset + nbytes


def write_tensor(path: str | os.PathLike | BinaryIO, tensor: np.ndarray) -> None:
    data = encode_tensor(tensor)
    if hasattr(path, 'write'):
        path.write(data)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as fh:
        fh.write(data)
    logger.debug("Wrote tensor %s to %s", np.shape(tensor), path)


def read_tensor(path: str | os.PathLike) -> np.ndarray:
    with open(path, 'rb') as fh:
        data = fh.read()
    tensor, end = decode_tensor(data)
    if end != len(data):
        raise FormatError(f"{len(data) - end} trailing bytes after tensor in {path}")
    return tensor


# ---------------------------------------------------------------------------
# Exporters
# ---------------------------------------------------------------------------

def to_gray8(image: np.ndarray, vmin: float | None = None, vmax: float | None = None) -> np.ndarray:
    image = np.asarray(image, dtype=np.float64)
    low = float(image.min()) if vmin is None else vmin
    high = float(image.max()) if vmax is None else vmax
    if high <= low:
        return np.zeros(image.shape, dtype=np.uint8)
    scaled = (np.clip(image, low, high) - low) / (high - low)
    return np.round(scaled * 255).astype(np.uint8)


def write_pgm(path: str | os.PathLike, image: np.ndarray,
              vmin: float | None = None, vmax: float | None = None) -> None:
    """Write an 8-bit binary PGM, mapping [vmin, vmax] linearly to [0, 255]."""
    gray = to_gray8(image, vmin, vmax)
    height, width = gray.shape
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode('ascii'))
        fh.write(gray.tobytes())


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    """Read an 8-bit binary (P5) or plain (P2) PGM as floats in [0, 1]."""
    with open(path, 'rb') as fh:
        data = fh.read()
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b'#':
            while pos < len(data) and data[pos:pos + 1] != b'\n':
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"Truncated PGM header in {path}")
        tokens.append(data[start:pos])
    magic, width, height, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic == b'P5':
        if maxval > 255:
            raise FormatError(f"Only 8-bit PGM files are supported, got maxval {maxval}")
        raw = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos + 1)
    elif magic == b'P2':
        raw = np.array(data[pos:].split()[:width * height], dtype=np.int64)
    else:
        raise FormatError(f"Not a PGM file: {path}")
    if raw.size != width * height:
        raise FormatError(f"Truncated PGM payload in {path}")
    return raw.reshape(height, width).astype(np.float64) / maxval


def write_csv(path: str | os.PathLike, frame: pd.DataFrame) -> None:
    """Plain-text CSV; infinite values are written as ``inf``."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format='%.10g')
