"""SCAN navigation dataset: generation, interpretation, splits, batching."""

from .batching import Batch, batch, make_batch, unbatch
from .grammar import (
    ACTION_SYMBOLS,
    COMMAND_WORDS,
    MAX_ACTION_LEN,
    MAX_COMMAND_LEN,
    Example,
    ScanParseError,
    enumerate_all,
    interpret,
    parse,
)
from .io import DataFormatError, format_example, load_official, save
from .splits import SPLIT_KINDS, SplitError, SplitSpec, make_split
from .vocab import (
    EOS,
    PAD,
    RESERVED,
    SOS,
    Vocabulary,
    VocabularyError,
    input_vocabulary,
    output_vocabulary,
)

__all__ = [
    "ACTION_SYMBOLS",
    "COMMAND_WORDS",
    "MAX_ACTION_LEN",
    "MAX_COMMAND_LEN",
    "EOS",
    "PAD",
    "RESERVED",
    "SOS",
    "SPLIT_KINDS",
    "Batch",
    "DataFormatError",
    "Example",
    "ScanParseError",
    "SplitError",
    "SplitSpec",
    "Vocabulary",
    "VocabularyError",
    "batch",
    "enumerate_all",
    "format_example",
    "input_vocabulary",
    "interpret",
    "load_official",
    "make_batch",
    "make_split",
    "output_vocabulary",
    "parse",
    "save",
    "unbatch",
]
