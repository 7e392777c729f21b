"""Binary checkpoints: "INCR" magic, version, JSON config, named float64 arrays.

Layout (all integers little-endian):

    4 bytes  magic "INCR"
    1 byte   format version (currently 1)
    u32      metadata length, then that many bytes of JSON (the config)
    u32      array count
    per array:
        u16  name length, then the name (utf-8)
        u32  rows, u32 cols
        rows*cols little-endian float64 values, row-major
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .config import ModelConfig
from .seq2seq import Seq2Seq

MAGIC = b"INCR"
VERSION = 1


class CheckpointError(ValueError):
    """Corrupt checkpoint or shape mismatch against the stored config."""


def save_checkpoint(model: Seq2Seq, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = json.dumps(model.config.to_dict(), sort_keys=True).encode("utf-8")
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([VERSION]))
        fh.write(struct.pack("<I", len(meta)))
        fh.write(meta)
        fh.write(struct.pack("<I", len(model.PARAM_NAMES)))
        for name in model.PARAM_NAMES:
            arr = model.p[name].value
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<II", arr.shape[0], arr.shape[1]))
            fh.write(arr.astype("<f8").tobytes())


def _read_exact(fh, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise CheckpointError("truncated checkpoint file")
    return data


def load_checkpoint(path) -> Seq2Seq:
    with Path(path).open("rb") as fh:
        if _read_exact(fh, 4) != MAGIC:
            raise CheckpointError("bad magic bytes; not a checkpoint file")
        version = _read_exact(fh, 1)[0]
        if version != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        (meta_len,) = struct.unpack("<I", _read_exact(fh, 4))
        config = ModelConfig.from_dict(json.loads(_read_exact(fh, meta_len).decode("utf-8")))
        (count,) = struct.unpack("<I", _read_exact(fh, 4))
        arrays: dict[str, np.ndarray] = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", _read_exact(fh, 2))
            name = _read_exact(fh, name_len).decode("utf-8")
            rows, cols = struct.unpack("<II", _read_exact(fh, 8))
            buf = _read_exact(fh, rows * cols * 8)
            arrays[name] = np.frombuffer(buf, dtype="<f8").reshape(rows, cols).astype(np.float64)
    expected = Seq2Seq.expected_shapes(config)
    if set(arrays) != set(expected):
        raise CheckpointError(
            f"parameter names {sorted(arrays)} do not match config {sorted(expected)}"
        )
    for name, shape in expected.items():
        if arrays[name].shape != shape:
            raise CheckpointError(f"{name}: stored shape {arrays[name].shape}, config wants {shape}")
    model = Seq2Seq(config, rng=None)
    for name, arr in arrays.items():
        model.p[name].value[...] = arr
    return model
