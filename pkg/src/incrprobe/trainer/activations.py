"""Per-example encoder activations and their binary dump format.

File layout ("INCA" format, integers little-endian):

    4 bytes  magic "INCA"
    1 byte   version (1)
    u32      metadata length, then JSON {"hidden_dim": H, "count": N}
    per record:
        u32  sequence length T
        T    int32 token indices
        T*H  float64 hidden states, row-major
        T*H  float64 cell states, row-major
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..model import Seq2Seq
from ..scan_data import Example, input_vocabulary
from ..scan_data.vocab import PAD

MAGIC = b"INCA"
VERSION = 1

_DUMP_CHUNK = 512


class DumpFormatError(ValueError):
    """Corrupt activation dump file."""


@dataclass
class ExampleActivations:
    tokens: tuple[int, ...]
    hidden: np.ndarray  # (T, H)
    cell: np.ndarray    # (T, H)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class ActivationDump:
    hidden_dim: int
    records: list[ExampleActivations]

    def __len__(self) -> int:
        return len(self.records)


def dump_activations(model: Seq2Seq, dataset: list[Example]) -> ActivationDump:
    """Encode every example and keep the full per-step hidden and cell states."""
    vocab_in = input_vocabulary()
    records: list[ExampleActivations] = []
    for lo in range(0, len(dataset), _DUMP_CHUNK):
        chunk = dataset[lo : lo + _DUMP_CHUNK]
        seqs = [vocab_in.encode(e.command) for e in chunk]
        lengths = [len(s) for s in seqs]
        src = np.full((len(chunk), max(lengths)), PAD, dtype=np.int64)
        for i, s in enumerate(seqs):
            src[i, : len(s)] = s
        hs, cs = model.encode_arrays(src)
        for i, s in enumerate(seqs):
            t = lengths[i]
            records.append(ExampleActivations(tuple(s), hs[i, :t].copy(), cs[i, :t].copy()))
    return ActivationDump(model.config.hidden_dim, records)


def save_dump(dump: ActivationDump, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = json.dumps({"hidden_dim": dump.hidden_dim, "count": len(dump.records)},
                      sort_keys=True).encode("utf-8")
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([VERSION]))
        fh.write(struct.pack("<I", len(meta)))
        fh.write(meta)
        for rec in dump.records:
            fh.write(struct.pack("<I", len(rec.tokens)))
            fh.write(np.asarray(rec.tokens, dtype="<i4").tobytes())
            fh.write(rec.hidden.astype("<f8").tobytes())
            fh.write(rec.cell.astype("<f8").tobytes())


def _read_exact(fh, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise DumpFormatError("truncated activation dump")
    return data


def load_dump(path) -> ActivationDump:
    with Path(path).open("rb") as fh:
        if _read_exact(fh, 4) != MAGIC:
            raise DumpFormatError("bad magic bytes; not an activation dump")
        version = _read_exact(fh, 1)[0]
        if version != VERSION:
            raise DumpFormatError(f"unsupported dump version {version}")
        (meta_len,) = struct.unpack("<I", _read_exact(fh, 4))
        meta = json.loads(_read_exact(fh, meta_len).decode("utf-8"))
        hidden_dim, count = meta["hidden_dim"], meta["count"]
        records = []
        for _ in range(count):
            (t,) = struct.unpack("<I", _read_exact(fh, 4))
            tokens = tuple(np.frombuffer(_read_exact(fh, 4 * t), dtype="<i4").tolist())
            hidden = np.frombuffer(_read_exact(fh, 8 * t * hidden_dim), dtype="<f8")
            cell = np.frombuffer(_read_exact(fh, 8 * t * hidden_dim), dtype="<f8")
            records.append(ExampleActivations(
                tokens,
                hidden.reshape(t, hidden_dim).astype(np.float64),
                cell.reshape(t, hidden_dim).astype(np.float64),
            ))
    return ActivationDump(hidden_dim, records)
