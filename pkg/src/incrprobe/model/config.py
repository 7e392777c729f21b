"""Architecture configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass

MASK_MODES = ("none", "causal", "local")


class ConfigError(ValueError):
    """Inconsistent model configuration."""


@dataclass(frozen=True)
class ModelConfig:
    """Sizes and switches for the encoder-decoder.

    `attention` turns on dot-product attention; `mask_mode` restricts which
    encoder positions the decoder may attend to (`local` needs `window`).
    `anticipation_weight` scales the next-input-token prediction loss on
    the encoder (0 disables it).
    """

    vocab_in: int
    vocab_out: int
    embedding_dim: int = 128
    hidden_dim: int = 128
    attention: bool = False
    mask_mode: str = "none"
    window: int = 0
    anticipation_weight: float = 0.0

    def __post_init__(self):
        if self.vocab_in < 4 or self.vocab_out < 4:
            raise ConfigError("vocab sizes must cover the reserved tokens")
        if self.embedding_dim < 1 or self.hidden_dim < 1:
            raise ConfigError("embedding_dim and hidden_dim must be >= 1")
        if self.mask_mode not in MASK_MODES:
            raise ConfigError(f"mask_mode must be one of {MASK_MODES}, got {self.mask_mode!r}")
        if self.mask_mode == "local" and self.window < 1:
            raise ConfigError("local masking needs window >= 1")
        if self.mask_mode != "none" and not self.attention:
            raise ConfigError("attention masks require attention=True")
        if not (self.anticipation_weight >= 0.0 and self.anticipation_weight < float("inf")):
            raise ConfigError("anticipation_weight must be finite and >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**d)
