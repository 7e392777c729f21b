"""Diagnostic-classifier accuracy over encoder activations.

For every timestep t >= 2, every earlier timestep t' < t, and each of the
k most frequent input tokens, a logistic probe is trained to predict from
the activation at t whether that token occurred at t'. Probe accuracies
are averaged two ways: plain, and weighted by the distance t - t' (larger
distances weigh more, normalized over all trained probes).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .. import numcore as nc
from ..trainer.activations import ActivationDump


class ProbeDataError(ValueError):
    """No trainable probe dataset in the dump."""


@dataclass(frozen=True)
class DcConfig:
    k_top: int = 5
    weighted: bool = True
    probe_epochs: int = 50
    probe_lr: float = 0.01
    class_weighting: bool = True
    holdout_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.k_top < 1:
            raise ValueError("k_top must be >= 1")
        if not (0.0 < self.holdout_fraction < 1.0):
            raise ValueError("holdout_fraction must be in (0, 1)")


@dataclass
class ProbeOutcome:
    time: int        # t, 1-based
    past_time: int   # t', 1-based
    token: int
    accuracy: float


@dataclass
class DcResult:
    dc_acc: float
    wdc_acc: float
    probes: list[ProbeOutcome] = field(default_factory=list)
    skipped: int = 0


def top_tokens(dump: ActivationDump, k: int) -> list[int]:
    """The k most frequent input tokens over all dump positions (ties by index)."""
    counts = Counter()
    for rec in dump.records:
        counts.update(rec.tokens)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [tok for tok, _ in ranked[:k]]


def probe_dataset(dump: ActivationDump, time: int, past_time: int, token: int):
    """Binary probe dataset: activation at `time` vs whether `token` occurred
    at `past_time` (both 1-based). Rows cover examples long enough for `time`."""
    if not (1 <= past_time < time):
        raise ValueError(f"need 1 <= past_time < time, got t'={past_time}, t={time}")
    feats, labels = [], []
    for rec in dump.records:
        if len(rec) >= time:
            feats.append(rec.hidden[time - 1])
            labels.append(1.0 if rec.tokens[past_time - 1] == token else 0.0)
    if not feats:
        return np.empty((0, dump.hidden_dim)), np.empty(0)
    return np.stack(feats), np.asarray(labels)


def train_probe(x_train, y_train, x_test, y_test, cfg: DcConfig) -> float:
    """Fit a class-weighted logistic probe with the shared optimizer; return
    held-out accuracy."""
    n = len(y_train)
    if cfg.class_weighting:
        n_pos = y_train.sum()
        n_neg = n - n_pos
        sample_w = np.where(y_train == 1.0, n / (2.0 * n_pos), n / (2.0 * n_neg))
    else:
        sample_w = np.ones(n)
    sample_w = (sample_w / sample_w.sum()).reshape(-1, 1)
    y_col = y_train.reshape(-1, 1)

    x = nc.Tensor(x_train)
    w = nc.Parameter(np.zeros((x_train.shape[1], 1)), name="probe_w")
    b = nc.Parameter(np.zeros((1, 1)), name="probe_b")
    opt = nc.AdamAmsgrad([w, b], lr=cfg.probe_lr)
    pos_w = nc.Tensor(sample_w * y_col)
    neg_w = nc.Tensor(sample_w * (1.0 - y_col))
    for _ in range(cfg.probe_epochs):
        p = nc.sigmoid(nc.add(nc.matmul(x, w), b))
        one_minus = nc.add(nc.scale(p, -1.0), nc.Tensor([[1.0]]))
        loss = nc.scale(
            nc.add(nc.sum_all(nc.mul(pos_w, nc.log(p))), nc.sum_all(nc.mul(neg_w, nc.log(one_minus)))),
            -1.0,
        )
        nc.backward(loss)
        opt.step()
    scores = x_test @ w.value + b.value[0, 0]
    predicted = (scores[:, 0] > 0.0).astype(np.float64)
    return float((predicted == y_test).mean())


def dc_accuracy(dump: ActivationDump, cfg: DcConfig = DcConfig()) -> DcResult:
    """Train all probes on an 80/20 example split and average their accuracies."""
    if not dump.records:
        raise ProbeDataError("empty activation dump")
    rng = nc.Rng(cfg.seed)
    perm = rng.permutation(len(dump.records))
    n_test = max(1, int(round(cfg.holdout_fraction * len(dump.records))))
    test_ids = set(perm[:n_test].tolist())
    is_test = np.array([i in test_ids for i in range(len(dump.records))])

    tokens = top_tokens(dump, cfg.k_top)
    max_t = max(len(rec) for rec in dump.records)
    outcomes: list[ProbeOutcome] = []
    skipped = 0
    for t in range(2, max_t + 1):
        ids = np.array([i for i, rec in enumerate(dump.records) if len(rec) >= t])
        if ids.size == 0:
            continue
        feats = np.stack([dump.records[i].hidden[t - 1] for i in ids])
        in_test = is_test[ids]
        for past in range(1, t):
            for token in tokens:
                labels = np.array(
                    [1.0 if dump.records[i].tokens[past - 1] == token else 0.0 for i in ids]
                )
                y_train, y_test = labels[~in_test], labels[in_test]
                if len(np.unique(y_train)) < 2 or y_test.size == 0:
                    skipped += 1
                    continue
                acc = train_probe(feats[~in_test], y_train, feats[in_test], y_test, cfg)
                outcomes.append(ProbeOutcome(t, past, token, acc))
    if not outcomes:
        raise ProbeDataError("no probe had both classes present; nothing to train")
    accs = np.array([o.accuracy for o in outcomes])
    dists = np.array([o.time - o.past_time for o in outcomes], dtype=np.float64)
    return DcResult(
        dc_acc=float(accs.mean()),
        wdc_acc=float((dists * accs).sum() / dists.sum()),
        probes=outcomes,
        skipped=skipped,
    )
