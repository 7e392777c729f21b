"""Multi-seed training, evaluation, and activation dumping."""

from .activations import (
    ActivationDump,
    DumpFormatError,
    ExampleActivations,
    dump_activations,
    load_dump,
    save_dump,
)
from .evaluate import decode_command, decode_examples, sequence_accuracy
from .train import RunManifest, TrainConfig, TrainingError, train_model, train_suite

__all__ = [
    "ActivationDump",
    "DumpFormatError",
    "ExampleActivations",
    "RunManifest",
    "TrainConfig",
    "TrainingError",
    "decode_command",
    "decode_examples",
    "dump_activations",
    "load_dump",
    "save_dump",
    "sequence_accuracy",
    "train_model",
    "train_suite",
]
