"""Index batches for training: PAD-padded sources, EOS-terminated targets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grammar import Example
from .vocab import EOS, PAD, Vocabulary


@dataclass
class Batch:
    """Padded index arrays plus true lengths.

    Sources carry no EOS (lengths do the masking); targets end with EOS
    and are then PAD-padded, so tgt_lengths counts the EOS.
    """

    src: np.ndarray          # (B, Ts) int
    src_lengths: np.ndarray  # (B,)
    tgt: np.ndarray          # (B, Lt) int
    tgt_lengths: np.ndarray  # (B,)

    @property
    def size(self) -> int:
        return self.src.shape[0]


def make_batch(examples: list[Example], vocab_in: Vocabulary, vocab_out: Vocabulary) -> Batch:
    src_seqs = [vocab_in.encode(e.command) for e in examples]
    tgt_seqs = [vocab_out.encode(e.actions) + [EOS] for e in examples]
    src_len = np.array([len(s) for s in src_seqs], dtype=np.int64)
    tgt_len = np.array([len(t) for t in tgt_seqs], dtype=np.int64)
    src = np.full((len(examples), int(src_len.max())), PAD, dtype=np.int64)
    tgt = np.full((len(examples), int(tgt_len.max())), PAD, dtype=np.int64)
    for i, (s, t) in enumerate(zip(src_seqs, tgt_seqs)):
        src[i, : len(s)] = s
        tgt[i, : len(t)] = t
    return Batch(src, src_len, tgt, tgt_len)


def batch(examples: list[Example], batch_size: int, vocab_in: Vocabulary, vocab_out: Vocabulary) -> list[Batch]:
    """Chunk the corpus in order; the last partial batch is kept."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    return [
        make_batch(examples[i : i + batch_size], vocab_in, vocab_out)
        for i in range(0, len(examples), batch_size)
    ]


def unbatch(b: Batch, vocab_in: Vocabulary, vocab_out: Vocabulary) -> list[Example]:
    """Invert make_batch: strip padding and the target EOS."""
    out = []
    for i in range(b.size):
        cmd = vocab_in.decode(b.src[i, : b.src_lengths[i]])
        act = vocab_out.decode(b.tgt[i, : b.tgt_lengths[i] - 1])
        out.append(Example(tuple(cmd), tuple(act)))
    return out
