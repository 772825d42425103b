"""Checkpoint files: named parameter tensors plus an architecture descriptor.

Layout (integers little-endian)::

    b"PATC" | u32 record count | records | u32 descriptor length | UTF-8 JSON descriptor

where each record is ``u32 name length | UTF-8 name | PATT tensor``.
"""

import json
import logging
import os
import struct
from pathlib import Path

import numpy as np

from patkit.core.io import decode_tensor, encode_tensor
from patkit.exceptions import FormatError
from patkit.nn.params import ParamSet

logger = logging.getLogger(__name__)

MAGIC = b"PATC"
_U32 = struct.Struct('<I')


def save_checkpoint(path: str | os.PathLike, params: ParamSet, descriptor: dict) -> None:
    chunks = [MAGIC, _U32.pack(len(params))]
    for name, tensor in params.items():
        encoded = name.encode('utf-8')
        chunks += [_U32.pack(len(encoded)), encoded, encode_tensor(tensor)]
    text = json.dumps(descriptor, sort_keys=True).encode('utf-8')
    chunks += [_U32.pack(len(text)), text]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as fh:
        fh.write(b"".join(chunks))
    logger.info("Saved %d parameter tensors to %s", len(params), path)


def _read_u32(view: memoryview, offset: int, what: str) -> tuple[int, int]:
    if len(view) - offset < _U32.size:
        raise FormatError(f"Truncated checkpoint while reading {what}")
    return _U32.unpack_from(view, offset)[0], offset + _U32.size


def _read_text(view: memoryview, offset: int, what: str) -> tuple[str, int]:
    length, offset = _read_u32(view, offset, what)
    if len(view) - offset < length:
        raise FormatError(f"Truncated checkpoint while reading {what}")
    try:
        return bytes(view[offset:offset + length]).decode('utf-8'), offset + length
    except UnicodeDecodeError as e:
        raise FormatError(f"Invalid UTF-8 in checkpoint {what}: {e}")


def load_checkpoint(path: str | os.PathLike) -> tuple[dict[str, np.ndarray], dict]:
    """Return the named tensors and the architecture descriptor."""
    with open(path, 'rb') as fh:
        view = memoryview(fh.read())
    if bytes(view[:4]) != MAGIC:
        raise FormatError(f"{path} is not a checkpoint file")
    count, offset = _read_u32(view, 4, "record count")
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        name, offset = _read_text(view, offset, "parameter name")
        tensors[name], offset = decode_tensor(view, offset)
    text, offset = _read_text(view, offset, "descriptor")
    if offset != len(view):
        raise FormatError(f"{len(view) - offset} trailing bytes in checkpoint {path}")
    try:
        descriptor = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"Malformed architecture descriptor in {path}: {e}")
    return tensors, descriptor
