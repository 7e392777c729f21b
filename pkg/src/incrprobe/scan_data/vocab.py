"""Token/index maps with fixed reserved slots."""

from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import ACTION_SYMBOLS, COMMAND_WORDS

PAD, SOS, EOS = 0, 1, 2
RESERVED = ("<pad>", "<sos>", "<eos>")


class VocabularyError(KeyError):
    """Token not covered by the vocabulary."""


@dataclass(frozen=True)
class Vocabulary:
    """Bijective token<->index map; indices 0..2 are PAD, SOS, EOS."""

    tokens: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        all_tokens = RESERVED + self.tokens
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(all_tokens)})
        if len(self._index) != len(all_tokens):
            raise ValueError("duplicate tokens in vocabulary")

    @property
    def size(self) -> int:
        return len(RESERVED) + len(self.tokens)

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise VocabularyError(f"token {token!r} not in vocabulary") from None

    def token(self, index: int) -> str:
        all_tokens = RESERVED + self.tokens
        if not (0 <= index < len(all_tokens)):
            raise VocabularyError(f"index {index} out of range")
        return all_tokens[index]

    def encode(self, tokens) -> list[int]:
        return [self.index(t) for t in tokens]

    def decode(self, indices) -> list[str]:
        return [self.token(i) for i in indices]


def input_vocabulary() -> Vocabulary:
    return Vocabulary(tuple(sorted(COMMAND_WORDS)))


def output_vocabulary() -> Vocabulary:
    return Vocabulary(tuple(sorted(ACTION_SYMBOLS)))
