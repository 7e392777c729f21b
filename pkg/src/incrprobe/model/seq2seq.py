"""Single-layer unidirectional LSTM encoder-decoder.

Training runs on the graph-recording tensor path (`loss_batch`); decoding,
activation dumps and metrics run on a plain-array path built from the same
cell math (`lstm_step_values`). The decoder is initialized from the encoder
state at each example's true length. With attention on, the decoder input
is [embedding | context]; the context is a dot-product attention average
over (possibly masked) encoder states. An optional head projects each
encoder state into the input vocabulary to predict the next input token.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import numcore as nc
from ..scan_data.batching import Batch
from ..scan_data.vocab import EOS, PAD, SOS, VocabularyError
from .config import ModelConfig
from .masks import attention_mask

MAX_DECODE_LEN = 64


@dataclass
class EncoderTrace:
    """Per-step encoder states for one example (arrays are (T, H))."""

    tokens: tuple[int, ...]
    hidden_states: np.ndarray
    cell_states: np.ndarray

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class DecoderStepOutput:
    """One decoder step: logits over the output vocabulary, the attention
    weights used (None with attention off), and the new recurrent state."""

    logits: np.ndarray
    attention_weights: np.ndarray | None
    hidden: np.ndarray
    cell: np.ndarray


def _np_masked_softmax(energies: np.ndarray, mask: np.ndarray) -> np.ndarray:
    neg = np.where(mask, energies, -np.inf)
    shifted = neg - neg.max(axis=1, keepdims=True)
    e = np.where(mask, np.exp(np.where(mask, shifted, 0.0)), 0.0)
    return e / e.sum(axis=1, keepdims=True)


class Seq2Seq:
    """Encoder-decoder over token indices; see module docstring."""

    PARAM_NAMES = (
        "enc_embed", "enc_wx", "enc_wh", "enc_b",
        "dec_embed", "dec_wx", "dec_wh", "dec_b",
        "out_w", "out_b",
        "anticipation_w", "anticipation_b",
    )

    def __init__(self, config: ModelConfig, rng: nc.Rng | None = None):
        self.config = config
        shapes = self.expected_shapes(config)
        self.p: dict[str, nc.Parameter] = {}
        for name in self.PARAM_NAMES:
            r, c = shapes[name]
            if rng is None or name.endswith("_b"):
                value = np.zeros((r, c))
            else:
                value = nc.xavier_uniform(r, c, rng)
            self.p[name] = nc.Parameter(value, name=name)
        hd = config.hidden_dim
        # Forget-gate bias starts at 1 to stabilize early training.
        self.p["enc_b"].value[0, hd : 2 * hd] = 1.0
        self.p["dec_b"].value[0, hd : 2 * hd] = 1.0

    @staticmethod
    def expected_shapes(config: ModelConfig) -> dict[str, tuple[int, int]]:
        e, h = config.embedding_dim, config.hidden_dim
        dec_in = e + h if config.attention else e
        return {
            "enc_embed": (config.vocab_in, e),
            "enc_wx": (e, 4 * h),
            "enc_wh": (h, 4 * h),
            "enc_b": (1, 4 * h),
            "dec_embed": (config.vocab_out, e),
            "dec_wx": (dec_in, 4 * h),
            "dec_wh": (h, 4 * h),
            "dec_b": (1, 4 * h),
            "out_w": (h, config.vocab_out),
            "out_b": (1, config.vocab_out),
            "anticipation_w": (h, config.vocab_in),
            "anticipation_b": (1, config.vocab_in),
        }

    def parameters(self) -> list[nc.Parameter]:
        return [self.p[name] for name in self.PARAM_NAMES]

    def _check_tokens(self, tokens, vocab_size: int, what: str):
        arr = np.asarray(tokens)
        if arr.size and (arr.min() < 0 or arr.max() >= vocab_size):
            raise VocabularyError(f"{what} token index out of range (vocab size {vocab_size})")

    # ------------------------------------------------------------------
    # Training path (graph-recording)
    # ------------------------------------------------------------------

    def _encode_tensors(self, src: np.ndarray) -> tuple[list[nc.Tensor], list[nc.Tensor]]:
        b, t_max = src.shape
        hd = self.config.hidden_dim
        h = nc.Tensor(np.zeros((b, hd)))
        c = nc.Tensor(np.zeros((b, hd)))
        h_steps, c_steps = [], []
        for t in range(t_max):
            x = nc.take_rows(self.p["enc_embed"], src[:, t])
            hc = nc.lstm_cell(x, h, c, self.p["enc_wx"], self.p["enc_wh"], self.p["enc_b"])
            h = nc.slice_cols(hc, 0, hd)
            c = nc.slice_cols(hc, hd, 2 * hd)
            h_steps.append(h)
            c_steps.append(c)
        return h_steps, c_steps

    def _state_at_length(self, steps: list[nc.Tensor], lengths: np.ndarray) -> nc.Tensor:
        total = None
        for t, state in enumerate(steps):
            sel = (lengths == t + 1)
            if not sel.any():
                continue
            picked = nc.mul(nc.Tensor(sel.astype(np.float64).reshape(-1, 1)), state)
            total = picked if total is None else nc.add(total, picked)
        assert total is not None, "no example length matched any step"
        return total

    def loss_batch(self, batch: Batch) -> tuple[nc.Tensor, float, float]:
        """Teacher-forced loss over one batch.

        Returns (total, seq2seq_part, anticipation_part): the total is a
        scalar tensor ready for backward; the parts are floats. The seq2seq
        part is the token-mean cross-entropy over non-PAD target positions
        (EOS included); the anticipation part is the example-mean of the
        per-example next-input-token loss.
        """
        self._check_tokens(batch.src, self.config.vocab_in, "source")
        self._check_tokens(batch.tgt, self.config.vocab_out, "target")
        if batch.tgt.shape[1] == 0 or (batch.tgt_lengths < 1).any():
            raise ValueError("empty target sequence")
        cfg = self.config
        h_steps, c_steps = self._encode_tensors(batch.src)
        s = self._state_at_length(h_steps, batch.src_lengths)
        c = self._state_at_length(c_steps, batch.src_lengths)
        stacked = np.stack([t.value for t in h_steps], axis=1) if cfg.attention else None

        n_tokens = float(batch.tgt_lengths.sum())
        dec_in = np.concatenate(
            [np.full((batch.size, 1), SOS, dtype=batch.tgt.dtype), batch.tgt[:, :-1]], axis=1
        )
        seq_loss = None
        for i in range(batch.tgt.shape[1]):
            x = nc.take_rows(self.p["dec_embed"], dec_in[:, i])
            if cfg.attention:
                mask = attention_mask(
                    batch.src_lengths, batch.src.shape[1], i + 1, cfg.mask_mode, cfg.window
                )
                context, _ = nc.dot_attention(s, h_steps, mask, stacked=stacked)
                x = nc.concat_cols([x, context])
            hc = nc.lstm_cell(x, s, c, self.p["dec_wx"], self.p["dec_wh"], self.p["dec_b"])
            s = nc.slice_cols(hc, 0, cfg.hidden_dim)
            c = nc.slice_cols(hc, cfg.hidden_dim, 2 * cfg.hidden_dim)
            probs = nc.softmax(nc.add(nc.matmul(s, self.p["out_w"]), self.p["out_b"]))
            weights = (batch.tgt[:, i] != PAD).astype(np.float64) / n_tokens
            term = nc.cross_entropy_rows(probs, batch.tgt[:, i], weights)
            seq_loss = term if seq_loss is None else nc.add(seq_loss, term)

        antcp_loss = self._anticipation_tensors(h_steps, batch.src, batch.src_lengths)
        total = seq_loss
        if cfg.anticipation_weight > 0.0 and antcp_loss is not None:
            total = nc.add(seq_loss, nc.scale(antcp_loss, cfg.anticipation_weight))
        antcp_value = antcp_loss.item() if antcp_loss is not None else 0.0
        return total, seq_loss.item(), antcp_value

    def _anticipation_tensors(self, h_steps, src, src_lengths):
        """Next-input-token loss, averaged per example then over examples
        with at least two tokens; None when no example qualifies."""
        lengths = np.asarray(src_lengths)
        eligible = lengths >= 2
        if not eligible.any():
            return None
        n_eligible = float(eligible.sum())
        per_row_norm = np.where(eligible, 1.0 / np.maximum(lengths - 1, 1), 0.0) / n_eligible
        loss = None
        for t in range(src.shape[1] - 1):
            has_next = (t + 1) < lengths
            if not has_next.any():
                break
            logits = nc.add(nc.matmul(h_steps[t], self.p["anticipation_w"]), self.p["anticipation_b"])
            probs = nc.softmax(logits)
            weights = np.where(has_next, per_row_norm, 0.0)
            term = nc.cross_entropy_rows(probs, src[:, t + 1], weights)
            loss = term if loss is None else nc.add(loss, term)
        return loss

    # ------------------------------------------------------------------
    # Inference path (plain arrays)
    # ------------------------------------------------------------------

    def encode_arrays(self, src: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Encoder states for padded sources; returns (B, T, H) h and c."""
        self._check_tokens(src, self.config.vocab_in, "source")
        b, t_max = src.shape
        hd = self.config.hidden_dim
        h = np.zeros((b, hd))
        c = np.zeros((b, hd))
        hs = np.empty((b, t_max, hd))
        cs = np.empty((b, t_max, hd))
        w = self.p
        for t in range(t_max):
            x = w["enc_embed"].value[src[:, t]]
            h, c = nc.lstm_step_values(x, h, c, w["enc_wx"].value, w["enc_wh"].value, w["enc_b"].value)
            hs[:, t] = h
            cs[:, t] = c
        return hs, cs

    def encode(self, tokens) -> EncoderTrace:
        """Encoder trace for one example."""
        tokens = tuple(int(t) for t in tokens)
        if len(tokens) < 1:
            raise ValueError("cannot encode an empty sequence")
        src = np.asarray(tokens, dtype=np.int64).reshape(1, -1)
        hs, cs = self.encode_arrays(src)
        return EncoderTrace(tokens, hs[0].copy(), cs[0].copy())

    def encoder_step(self, x_embed: np.ndarray, h: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """One encoder cell application on raw vectors (used by metrics)."""
        w = self.p
        h2, c2 = nc.lstm_step_values(
            x_embed.reshape(1, -1), h.reshape(1, -1), c.reshape(1, -1),
            w["enc_wx"].value, w["enc_wh"].value, w["enc_b"].value,
        )
        return h2[0], c2[0]

    def input_embedding(self, token_index: int) -> np.ndarray:
        self._check_tokens([token_index], self.config.vocab_in, "source")
        return self.p["enc_embed"].value[token_index].copy()

    def attend(self, s_prev: np.ndarray, trace: EncoderTrace, step: int) -> tuple[np.ndarray, np.ndarray]:
        """Dot attention of a decoder state over one trace at `step` (1-based).

        Returns (context, weights); masked positions have weight exactly 0.
        """
        if not self.config.attention:
            raise ValueError("attend() requires a model built with attention")
        if step < 1:
            raise ValueError("decoder step is 1-based")
        t = len(trace)
        mask = attention_mask([t], t, step, self.config.mask_mode, self.config.window)
        energies = (trace.hidden_states @ s_prev).reshape(1, -1)
        alpha = _np_masked_softmax(energies, mask)[0]
        context = alpha @ trace.hidden_states
        return context, alpha

    def decode_step(self, prev_token: int, hidden: np.ndarray, cell: np.ndarray,
                    trace: EncoderTrace, step: int) -> DecoderStepOutput:
        """One greedy-decoding step (1-based `step`) from the previous token."""
        self._check_tokens([prev_token], self.config.vocab_out, "target")
        w = self.p
        x = w["dec_embed"].value[prev_token]
        weights = None
        if self.config.attention:
            context, weights = self.attend(hidden, trace, step)
            x = np.concatenate([x, context])
        h2, c2 = nc.lstm_step_values(
            x.reshape(1, -1), hidden.reshape(1, -1), cell.reshape(1, -1),
            w["dec_wx"].value, w["dec_wh"].value, w["dec_b"].value,
        )
        logits = h2 @ w["out_w"].value + w["out_b"].value
        return DecoderStepOutput(logits[0], weights, h2[0], c2[0])

    def greedy_decode(self, tokens, max_len: int = MAX_DECODE_LEN) -> list[int]:
        """Argmax decoding from SOS until EOS or max_len action tokens."""
        src = np.asarray(list(tokens), dtype=np.int64).reshape(1, -1)
        return self.greedy_decode_batch(src, np.array([src.shape[1]]), max_len)[0]

    def greedy_decode_batch(self, src: np.ndarray, lengths: np.ndarray,
                            max_len: int = MAX_DECODE_LEN) -> list[list[int]]:
        lengths = np.asarray(lengths, dtype=np.int64)
        hs, cs = self.encode_arrays(src)
        b = src.shape[0]
        rows = np.arange(b)
        s = hs[rows, lengths - 1]
        c = cs[rows, lengths - 1]
        w = self.p
        cfg = self.config
        prev = np.full(b, SOS, dtype=np.int64)
        finished = np.zeros(b, dtype=bool)
        outputs: list[list[int]] = [[] for _ in range(b)]
        for i in range(1, max_len + 1):
            x = w["dec_embed"].value[prev]
            if cfg.attention:
                energies = np.einsum("bh,bth->bt", s, hs)
                mask = attention_mask(lengths, src.shape[1], i, cfg.mask_mode, cfg.window)
                alpha = _np_masked_softmax(energies, mask)
                x = np.concatenate([x, np.einsum("bt,bth->bh", alpha, hs)], axis=1)
            s, c = nc.lstm_step_values(x, s, c, w["dec_wx"].value, w["dec_wh"].value, w["dec_b"].value)
            logits = s @ w["out_w"].value + w["out_b"].value
            nxt = logits.argmax(axis=1)
            for j in range(b):
                if not finished[j]:
                    if nxt[j] == EOS:
                        finished[j] = True
                    else:
                        outputs[j].append(int(nxt[j]))
            if finished.all():
                break
            prev = np.where(finished, EOS, nxt)
        return outputs

    # ------------------------------------------------------------------
    # Per-example losses (value-level)
    # ------------------------------------------------------------------

    def anticipation_loss(self, trace: EncoderTrace) -> float:
        """Mean cross-entropy of predicting each next input token from the
        current encoder state; 0.0 for single-token sequences."""
        t_len = len(trace)
        if t_len < 2:
            return 0.0
        w = self.p
        logits = trace.hidden_states[:-1] @ w["anticipation_w"].value + w["anticipation_b"].value
        shifted = logits - logits.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        probs = e / e.sum(axis=1, keepdims=True)
        nxt = np.asarray(trace.tokens[1:])
        picked = np.maximum(probs[np.arange(t_len - 1), nxt], nc.LOG_CLAMP)
        return float(-np.log(picked).mean())

    def sequence_loss(self, src_tokens, action_tokens) -> tuple[float, float, float]:
        """(total, seq2seq_part, anticipation_part) for one example; the
        target gets EOS appended here."""
        src = [int(t) for t in src_tokens]
        tgt = [int(t) for t in action_tokens]
        if not tgt:
            raise ValueError("empty target sequence")
        batch = Batch(
            src=np.asarray(src, dtype=np.int64).reshape(1, -1),
            src_lengths=np.array([len(src)], dtype=np.int64),
            tgt=np.asarray(tgt + [EOS], dtype=np.int64).reshape(1, -1),
            tgt_lengths=np.array([len(tgt) + 1], dtype=np.int64),
        )
        with nc.no_grad():
            total, seq_part, antcp_part = self.loss_batch(batch)
        return total.item(), seq_part, antcp_part
