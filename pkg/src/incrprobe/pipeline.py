"""End-to-end experiment pipeline.

Stages: generate data -> train vanilla and attention suites -> dump encoder
activations on the test set -> compute metrics per run -> emit report files.
Each stage skips itself when its outputs already exist (so reruns resume),
and a failed stage leaves a `_failed_<stage>.txt` marker in the run dir.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import correlation_matrix, emit_report
from .metrics import DcConfig, MetricReport, RepSimConfig, compute_report, integration_trace
from .model import ModelConfig, load_checkpoint
from .scan_data import SplitSpec, enumerate_all, input_vocabulary, load_official, make_split, output_vocabulary, save
from .numcore import Rng
from .trainer import RunManifest, TrainConfig, dump_activations, load_dump, save_dump, train_suite

ARCHES = ("vanilla", "attention")
PRESETS = {
    "desk": {"embedding_dim": 64, "hidden_dim": 64, "epochs": 25, "n_seeds": 5},
    "full": {"embedding_dim": 128, "hidden_dim": 128, "epochs": 50, "n_seeds": 15},
}
N_TRACE_COMMANDS = 5


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    preset: str = "desk"
    data_dir: str = "data"
    run_dir: str = "runs"
    report_dir: str = "reports"
    split: str = "add_prim_jump"
    embedding_dim: int = 64
    hidden_dim: int = 64
    epochs: int = 25
    n_seeds: int = 5
    lr: float = 0.001
    batch_size: int = 128
    base_seed: int = 0
    mask_mode: str = "none"          # applied to the attention variant
    window: int = 0
    anticipation_weight: float = 0.0
    dc: DcConfig = field(default_factory=DcConfig)
    repsim: RepSimConfig = field(default_factory=RepSimConfig)
    jobs: int = 1

    @classmethod
    def from_preset(cls, preset: str, **overrides) -> "PipelineConfig":
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
        merged = dict(PRESETS[preset])
        merged.update(overrides)
        return cls(preset=preset, **merged)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "preset", "data_dir", "run_dir", "report_dir", "split",
            "embedding_dim", "hidden_dim", "epochs", "n_seeds", "lr",
            "batch_size", "base_seed", "mask_mode", "window",
            "anticipation_weight", "jobs",
        )}
        d["dc"] = {"k_top": self.dc.k_top, "probe_epochs": self.dc.probe_epochs,
                   "probe_lr": self.dc.probe_lr, "class_weighting": self.dc.class_weighting,
                   "holdout_fraction": self.dc.holdout_fraction, "seed": self.dc.seed}
        d["repsim"] = {"order": self.repsim.order, "n_hist": self.repsim.n_hist,
                       "distance": self.repsim.distance}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        dc = DcConfig(**d.pop("dc", {}))
        repsim = RepSimConfig(**d.pop("repsim", {}))
        preset = d.pop("preset", "desk")
        base = dict(PRESETS[preset]) if preset in PRESETS else {}
        base.update(d)
        return cls(preset=preset, dc=dc, repsim=repsim, **base)

    def model_config(self, arch: str) -> ModelConfig:
        if arch not in ARCHES:
            raise ValueError(f"unknown architecture {arch!r}")
        attention = arch == "attention"
        return ModelConfig(
            vocab_in=input_vocabulary().size,
            vocab_out=output_vocabulary().size,
            embedding_dim=self.embedding_dim,
            hidden_dim=self.hidden_dim,
            attention=attention,
            mask_mode=self.mask_mode if attention else "none",
            window=self.window if attention else 0,
            anticipation_weight=self.anticipation_weight,
        )

    def train_config(self, arch: str) -> TrainConfig:
        return TrainConfig(
            model=self.model_config(arch),
            split=SplitSpec(self.split),
            epochs=self.epochs,
            lr=self.lr,
            batch_size=self.batch_size,
            n_seeds=self.n_seeds,
            base_seed=self.base_seed,
        )


def generate_data(split: str, out_dir, base_seed: int = 0, log=print) -> tuple[Path, Path]:
    """Write train.txt and test.txt for a split; reused by the CLI command."""
    out_dir = Path(out_dir)
    train_path, test_path = out_dir / "train.txt", out_dir / "test.txt"
    examples = enumerate_all()
    train, test = make_split(examples, SplitSpec(split), Rng(base_seed))
    save(train, train_path)
    save(test, test_path)
    log(f"wrote {len(train)} train and {len(test)} test examples to {out_dir}")
    return train_path, test_path


def _stage(run_dir: Path, name: str):
    """Context manager that drops a failure marker if the stage raises."""

    class _Stage:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None:
                run_dir.mkdir(parents=True, exist_ok=True)
                (run_dir / f"_failed_{name}.txt").write_text(f"{exc_type.__name__}: {exc}\n")
                raise PipelineError(name, exc) from exc
            return False

    return _Stage()


def run_pipeline(cfg: PipelineConfig, force: bool = False, log=print) -> str:
    """Run all stages; returns "exists" (nothing to do) or "completed"."""
    data_dir, run_dir, report_dir = Path(cfg.data_dir), Path(cfg.run_dir), Path(cfg.report_dir)
    final_outputs = [report_dir / n for n in ("metrics.csv", "correlations.csv", "traces.json")]
    if not force and all(p.exists() for p in final_outputs):
        log(f"outputs exist in {report_dir}; rerun with --force to rebuild")
        return "exists"

    train_path, test_path = data_dir / "train.txt", data_dir / "test.txt"
    with _stage(run_dir, "data"):
        if force or not (train_path.exists() and test_path.exists()):
            generate_data(cfg.split, data_dir, cfg.base_seed, log=log)
        train_set = load_official(train_path)
        test_set = load_official(test_path)

    manifests: dict[str, RunManifest] = {}
    with _stage(run_dir, "train"):
        for arch in ARCHES:
            arch_dir = run_dir / arch
            manifest_path = arch_dir / "manifest.json"
            if force or not manifest_path.exists():
                log(f"training {cfg.n_seeds} {arch} seed(s)...")
                manifests[arch] = train_suite(
                    train_set, test_set, cfg.train_config(arch), arch_dir, jobs=cfg.jobs
                )
            else:
                manifests[arch] = RunManifest.load(manifest_path)

    with _stage(run_dir, "dump"):
        for arch in ARCHES:
            arch_dir = run_dir / arch
            for entry in manifests[arch].entries:
                if "error" in entry:
                    continue
                dump_path = arch_dir / f"seed_{entry['seed']}.inca"
                if force or not dump_path.exists():
                    model = load_checkpoint(arch_dir / entry["checkpoint"])
                    save_dump(dump_activations(model, test_set), dump_path)

    reports_path = run_dir / "reports.json"
    with _stage(run_dir, "metrics"):
        if force or not reports_path.exists():
            reports = []
            for arch in ARCHES:
                arch_dir = run_dir / arch
                for entry in manifests[arch].entries:
                    if "error" in entry:
                        continue
                    model = load_checkpoint(arch_dir / entry["checkpoint"])
                    dump = load_dump(arch_dir / f"seed_{entry['seed']}.inca")
                    report = compute_report(
                        arch, entry["seed"], model, dump, entry["test_seq_acc"],
                        cfg.dc, cfg.repsim,
                    )
                    reports.append(report.to_dict())
                    log(f"metrics done for {arch} seed {entry['seed']}")
            reports_path.write_text(json.dumps(reports, indent=2) + "\n")

    traces_path = run_dir / "traces_raw.json"
    with _stage(run_dir, "traces"):
        if force or not traces_path.exists():
            vocab_in = input_vocabulary()
            picked = [e for e in test_set if "after" in e.command][:N_TRACE_COMMANDS]
            traces = []
            for arch in ARCHES:
                arch_dir = run_dir / arch
                for entry in manifests[arch].entries:
                    if "error" in entry:
                        continue
                    model = load_checkpoint(arch_dir / entry["checkpoint"])
                    for example in picked:
                        pairs = integration_trace(model, vocab_in.encode(example.command))
                        traces.append({
                            "arch": arch,
                            "seed": entry["seed"],
                            "command": list(example.command),
                            "trace": [[t, None if r != r else r] for t, r in pairs],
                        })
            traces_path.write_text(json.dumps(traces, indent=2) + "\n")

    with _stage(run_dir, "report"):
        reports = [MetricReport.from_dict(d) for d in json.loads(reports_path.read_text())]
        matrix = correlation_matrix(reports) if len(reports) >= 2 else None
        traces = json.loads(traces_path.read_text())
        emit_report(reports, matrix, traces, report_dir)
        log(f"report files written to {report_dir}")
    return "completed"
