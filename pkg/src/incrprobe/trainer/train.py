"""Seeded training runs and multi-seed suites."""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import numcore as nc
from ..model import ModelConfig, Seq2Seq, save_checkpoint
from ..scan_data import Example, SplitSpec, batch, input_vocabulary, output_vocabulary
from .evaluate import sequence_accuracy


class TrainingError(RuntimeError):
    """Training aborted (non-finite loss, bad configuration)."""


@dataclass(frozen=True)
class TrainConfig:
    model: ModelConfig
    split: SplitSpec = field(default_factory=SplitSpec)
    epochs: int = 50
    lr: float = 0.001
    batch_size: int = 128
    n_seeds: int = 15
    base_seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise TrainingError(f"epochs must be >= 1, got {self.epochs}")
        if self.n_seeds < 1:
            raise TrainingError(f"n_seeds must be >= 1, got {self.n_seeds}")
        if self.batch_size < 1:
            raise TrainingError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.model.vocab_in != input_vocabulary().size or self.model.vocab_out != output_vocabulary().size:
            raise TrainingError("model vocab sizes do not match the SCAN vocabularies")

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "split": self.split.kind,
            "epochs": self.epochs,
            "lr": self.lr,
            "batch_size": self.batch_size,
            "n_seeds": self.n_seeds,
            "base_seed": self.base_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(
            model=ModelConfig.from_dict(d["model"]),
            split=SplitSpec(d.get("split", "add_prim_jump")),
            epochs=d.get("epochs", 50),
            lr=d.get("lr", 0.001),
            batch_size=d.get("batch_size", 128),
            n_seeds=d.get("n_seeds", 15),
            base_seed=d.get("base_seed", 0),
        )

    def hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(canon).hexdigest()[:16]


def train_model(train_set: list[Example], config: TrainConfig, seed: int) -> tuple[Seq2Seq, dict]:
    """Train one model to the final epoch; returns the model and loss stats.

    Weight init, per-epoch shuffling and nothing else consume the seeded
    stream, so a seed fully determines the checkpoint.
    """
    if not train_set:
        raise TrainingError("empty training set")
    rng = nc.Rng(seed)
    model = Seq2Seq(config.model, rng)
    opt = nc.AdamAmsgrad(model.parameters(), lr=config.lr)
    vocab_in, vocab_out = input_vocabulary(), output_vocabulary()
    epoch_losses = []
    for epoch in range(config.epochs):
        perm = rng.permutation(len(train_set))
        shuffled = [train_set[i] for i in perm]
        batch_losses = []
        for b_idx, b in enumerate(batch(shuffled, config.batch_size, vocab_in, vocab_out)):
            total, _, _ = model.loss_batch(b)
            value = total.item()
            if not np.isfinite(value):
                raise TrainingError(f"non-finite loss at epoch {epoch}, batch {b_idx}")
            nc.backward(total)
            opt.step()
            batch_losses.append(value)
        epoch_losses.append(float(np.mean(batch_losses)))
    return model, {"seed": seed, "epoch_losses": epoch_losses}


@dataclass
class RunManifest:
    """Per-seed results of a training suite."""

    config: dict
    config_hash: str
    entries: list[dict]

    def to_dict(self) -> dict:
        return {"config": self.config, "config_hash": self.config_hash, "entries": self.entries}

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        return cls(d["config"], d["config_hash"], d["entries"])

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "RunManifest":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _run_one_seed(args) -> dict:
    train_set, test_set, config, seed, out_dir = args
    started = time.perf_counter()
    try:
        model, stats = train_model(train_set, config, seed)
        ckpt_path = Path(out_dir) / f"seed_{seed}.ckpt"
        save_checkpoint(model, ckpt_path)
        acc = sequence_accuracy(model, test_set)
        return {
            "seed": seed,
            "checkpoint": ckpt_path.name,
            "final_train_loss": stats["epoch_losses"][-1],
            "epoch_losses": stats["epoch_losses"],
            "test_seq_acc": acc,
            "wall_time_s": time.perf_counter() - started,
        }
    except Exception as exc:  # per-seed isolation: record, let the rest run
        return {"seed": seed, "error": f"{type(exc).__name__}: {exc}",
                "wall_time_s": time.perf_counter() - started}


def train_suite(train_set: list[Example], test_set: list[Example], config: TrainConfig,
                out_dir, jobs: int = 1) -> RunManifest:
    """Train n_seeds independent models (seeds base..base+n-1), save their
    checkpoints under out_dir and return the manifest (also written there)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = [config.base_seed + i for i in range(config.n_seeds)]
    tasks = [(train_set, test_set, config, s, str(out_dir)) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_run_one_seed, tasks))
    else:
        entries = [_run_one_seed(t) for t in tasks]
    manifest = RunManifest(config.to_dict(), config.hash(), entries)
    manifest.save(out_dir / "manifest.json")
    return manifest
