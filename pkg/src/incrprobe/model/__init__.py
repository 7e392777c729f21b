"""LSTM encoder-decoder with optional masked dot attention."""

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .config import MASK_MODES, ConfigError, ModelConfig
from .masks import attention_mask
from .seq2seq import MAX_DECODE_LEN, DecoderStepOutput, EncoderTrace, Seq2Seq

__all__ = [
    "MASK_MODES",
    "MAX_DECODE_LEN",
    "CheckpointError",
    "ConfigError",
    "DecoderStepOutput",
    "EncoderTrace",
    "ModelConfig",
    "Seq2Seq",
    "attention_mask",
    "load_checkpoint",
    "save_checkpoint",
]
