"""Greedy-decoding evaluation."""

from __future__ import annotations

import numpy as np

from ..model import Seq2Seq
from ..scan_data import Example, input_vocabulary, output_vocabulary
from ..scan_data.vocab import PAD

_EVAL_CHUNK = 256


def decode_command(model: Seq2Seq, command) -> tuple[str, ...]:
    """Greedy-decode one command (words in, action symbols out)."""
    vocab_in, vocab_out = input_vocabulary(), output_vocabulary()
    indices = model.greedy_decode(vocab_in.encode(command))
    return tuple(vocab_out.decode(indices))


def decode_examples(model: Seq2Seq, examples: list[Example]) -> list[tuple[str, ...]]:
    """Greedy-decode a corpus in padded chunks."""
    vocab_in, vocab_out = input_vocabulary(), output_vocabulary()
    decoded: list[tuple[str, ...]] = []
    for lo in range(0, len(examples), _EVAL_CHUNK):
        chunk = examples[lo : lo + _EVAL_CHUNK]
        seqs = [vocab_in.encode(e.command) for e in chunk]
        lengths = np.array([len(s) for s in seqs], dtype=np.int64)
        src = np.full((len(chunk), int(lengths.max())), PAD, dtype=np.int64)
        for i, s in enumerate(seqs):
            src[i, : len(s)] = s
        for out in model.greedy_decode_batch(src, lengths):
            decoded.append(tuple(vocab_out.decode(out)))
    return decoded


def sequence_accuracy(model: Seq2Seq, test_set: list[Example]) -> float:
    """Fraction of examples whose greedy decoding matches the target exactly."""
    if not test_set:
        raise ValueError("sequence_accuracy over an empty test set")
    decoded = decode_examples(model, test_set)
    hits = sum(1 for d, e in zip(decoded, test_set) if d == e.actions)
    return hits / len(test_set)
