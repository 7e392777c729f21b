"""Attention masks over encoder positions.

Positions are 1-based in the contracts below; arrays are 0-based. All
masks also exclude padding beyond each example's true length, and every
mask leaves position min(step, length) attendable, so no row is empty.
"""

from __future__ import annotations

import numpy as np


def attention_mask(src_lengths, n_positions: int, decoder_step: int, mode: str, window: int = 0) -> np.ndarray:
    """Boolean (batch, n_positions) mask for one decoder step (1-based).

    - "none": every real (non-padding) position.
    - "causal": positions t <= decoder_step.
    - "local": positions within `window` of the step, the window clamped
      into [1, length] (for steps past the end it covers the tail).
    """
    lengths = np.asarray(src_lengths, dtype=np.int64).reshape(-1, 1)
    if decoder_step < 1:
        raise ValueError(f"decoder_step is 1-based, got {decoder_step}")
    pos = np.arange(1, n_positions + 1, dtype=np.int64).reshape(1, -1)
    valid = pos <= lengths
    if mode == "none":
        return valid
    if mode == "causal":
        return valid & (pos <= decoder_step)
    if mode == "local":
        center = np.minimum(decoder_step, lengths)
        return valid & (np.abs(pos - center) <= window)
    raise ValueError(f"unknown mask mode {mode!r}")
