"""Representational similarity of states following identical token histories.

For the most frequent token n-grams ("histories") in the dump, collect the
hidden state one step *after* each occurrence (so the model has encoded one
further, arbitrary token) and score each history by the mean pairwise
distance of those states. Lower means the model "remembers" the shared
history more uniformly. Occurrences at the end of a sequence contribute to
frequency but have no following state and are skipped.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from ..trainer.activations import ActivationDump

DISTANCES = ("euclidean", "cosine")


class NoHistoryError(ValueError):
    """No history of the requested order has two comparable states."""


@dataclass(frozen=True)
class RepSimConfig:
    order: int = 2
    n_hist: int = 5
    distance: str = "euclidean"

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.n_hist < 1:
            raise ValueError("n_hist must be >= 1")
        if self.distance not in DISTANCES:
            raise ValueError(f"distance must be one of {DISTANCES}")


def _distance(u: np.ndarray, v: np.ndarray, kind: str) -> float:
    if kind == "euclidean":
        return float(np.linalg.norm(u - v))
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 1.0
    return float(1.0 - (u @ v) / (nu * nv))


def mean_pairwise_distance(states: list[np.ndarray], kind: str = "euclidean") -> float:
    if len(states) < 2:
        raise ValueError("need at least two states for a pairwise distance")
    dists = [
        _distance(states[i], states[j], kind)
        for i in range(len(states))
        for j in range(i + 1, len(states))
    ]
    return float(np.mean(dists))


def collect_histories(dump: ActivationDump, order: int):
    """Occurrence counts and following-state lists for every order-gram."""
    counts: Counter = Counter()
    states: dict[tuple[int, ...], list[np.ndarray]] = defaultdict(list)
    for rec in dump.records:
        toks = rec.tokens
        for end in range(order - 1, len(toks)):
            gram = toks[end - order + 1 : end + 1]
            counts[gram] += 1
            if end + 1 < len(toks):
                states[gram].append(rec.hidden[end + 1])
    return counts, states


def repr_similarity(dump: ActivationDump, cfg: RepSimConfig = RepSimConfig()) -> float:
    """Mean over the n_hist most frequent comparable histories of their
    mean pairwise state distance."""
    counts, states = collect_histories(dump, cfg.order)
    comparable = [g for g in counts if len(states.get(g, ())) >= 2]
    if not comparable:
        raise NoHistoryError(f"no history of order {cfg.order} occurs twice with a following token")
    comparable.sort(key=lambda g: (-counts[g], g))
    chosen = comparable[: cfg.n_hist]
    scores = [mean_pairwise_distance(states[g], cfg.distance) for g in chosen]
    return float(np.mean(scores))
