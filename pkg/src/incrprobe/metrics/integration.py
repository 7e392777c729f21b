"""Integration ratio: new-input magnitude vs history-loss magnitude.

For each timestep t >= 2 the encoder cell is re-run twice from the dumped
states: once on the true token embedding with a zeroed state (and zeroed
cell), once on a zero embedding with the true previous state. The distances
of both results from the true h_t give the per-step ratio; ratios are
averaged per example (optionally with weights (T-t)/t) and then over the
corpus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model import Seq2Seq
from ..trainer.activations import ActivationDump, ExampleActivations

RATIO_EPS = 1e-12


class DegenerateRecurrenceError(RuntimeError):
    """Every ratio was excluded by the epsilon guard; metric undefined."""


@dataclass
class IntegrationResult:
    value: float
    weighted: bool
    n_examples: int
    n_excluded_terms: int
    n_skipped_examples: int


def _per_step_ratios(model: Seq2Seq, rec: ExampleActivations, embed_cache: dict) -> list[tuple[int, float]]:
    """(t, ratio) pairs for t in [2, T]; the epsilon guard drops a pair by
    recording (t, nan)."""
    hidden_dim = model.config.hidden_dim
    embed_dim = model.config.embedding_dim
    zeros_h = np.zeros(hidden_dim)
    zeros_x = np.zeros(embed_dim)
    out = []
    for idx in range(1, len(rec)):
        token = rec.tokens[idx]
        if token not in embed_cache:
            embed_cache[token] = model.encoder_step(
                model.input_embedding(token), zeros_h, zeros_h
            )[0]
        fresh_h = embed_cache[token]
        carried_h, _ = model.encoder_step(zeros_x, rec.hidden[idx - 1], rec.cell[idx - 1])
        new_info = np.linalg.norm(rec.hidden[idx] - fresh_h)
        lost_info = np.linalg.norm(rec.hidden[idx] - carried_h)
        if lost_info < RATIO_EPS:
            out.append((idx + 1, float("nan")))
        else:
            out.append((idx + 1, new_info / lost_info))
    return out


def integration_trace(model: Seq2Seq, tokens) -> list[tuple[int, float]]:
    """Per-timestep ratios for one command, for plotting; excluded steps are NaN."""
    trace = model.encode(tokens)
    if len(trace) < 2:
        raise ValueError("integration trace needs at least two tokens")
    rec = ExampleActivations(trace.tokens, trace.hidden_states, trace.cell_states)
    return _per_step_ratios(model, rec, {})


def integration_ratio(model: Seq2Seq, dump: ActivationDump, weighted: bool = False) -> IntegrationResult:
    """Corpus-level integration ratio (mean over examples of per-example scores)."""
    embed_cache: dict = {}
    per_example = []
    excluded = 0
    skipped = 0
    for rec in dump.records:
        t_len = len(rec)
        if t_len < 2:
            skipped += 1
            continue
        pairs = _per_step_ratios(model, rec, embed_cache)
        ratios = np.array([r for _, r in pairs])
        ok = ~np.isnan(ratios)
        excluded += int((~ok).sum())
        if not ok.any():
            skipped += 1
            continue
        if weighted:
            steps = np.array([t for t, _ in pairs], dtype=np.float64)
            w = (t_len - steps) / steps
            norm = w[ok].sum()
            if norm <= 0.0:  # T=2 has a single zero-weight term
                skipped += 1
                continue
            per_example.append(float((w[ok] * ratios[ok]).sum() / norm))
        else:
            per_example.append(float(ratios[ok].mean()))
    if not per_example:
        raise DegenerateRecurrenceError(
            "degenerate recurrence: no example produced a usable ratio"
        )
    return IntegrationResult(
        value=float(np.mean(per_example)),
        weighted=weighted,
        n_examples=len(per_example),
        n_excluded_terms=excluded,
        n_skipped_examples=skipped,
    )
