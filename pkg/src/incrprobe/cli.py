"""Command-line entry point.

Subcommands: generate-data, train, eval, probe, report, pipeline. Every
command accepts --config <json-file> whose keys provide defaults that
explicit flags override; INCRPROBE_SEED overrides the base seed. Each
command prints its resolved configuration (and its hash) before running.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from .analysis import emit_report
from .metrics import DcConfig, RepSimConfig, dc_accuracy, integration_ratio, repr_similarity
from .model import ModelConfig, load_checkpoint
from .numcore import Rng
from .pipeline import PRESETS, PipelineConfig, generate_data, run_pipeline
from .scan_data import SPLIT_KINDS, SplitSpec, enumerate_all, input_vocabulary, load_official, make_split, output_vocabulary
from .trainer import TrainConfig, load_dump, sequence_accuracy, train_suite


class UsageError(ValueError):
    """Bad invocation; maps to exit code 2."""


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise UsageError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {p} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {p} must hold a JSON object")
    return data


def _env_seed() -> int | None:
    raw = os.environ.get("INCRPROBE_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"INCRPROBE_SEED must be an integer, got {raw!r}") from None


def _resolve(flag_value, file_value, default):
    """Flag beats config file beats default (flags use None sentinels)."""
    if flag_value is not None:
        return flag_value
    if file_value is not None:
        return file_value
    return default


def _announce(command: str, resolved: dict, log=print):
    canon = json.dumps(resolved, sort_keys=True)
    digest = hashlib.sha256(canon.encode("utf-8")).hexdigest()[:12]
    log(f"[{command}] config hash {digest}")
    log(f"[{command}] resolved config: {canon}")


def _parse_mask(raw: str) -> tuple[str, int]:
    if raw in ("none", "causal"):
        return raw, 0
    if raw.startswith("local:"):
        try:
            window = int(raw.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad local mask window in {raw!r}") from None
        return "local", window
    raise UsageError(f"mask must be none, causal, or local:<w>, got {raw!r}")


def _split_data(split: str, seed: int):
    train, test = make_split(enumerate_all(), SplitSpec(split), Rng(seed))
    return train, test


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def _cmd_generate_data(args) -> int:
    file_cfg = _load_config_file(args.config)
    split = _resolve(args.split, file_cfg.get("split"), "add_prim_jump")
    seed = _resolve(_env_seed(), file_cfg.get("seed"), 0)
    out = _resolve(args.out, file_cfg.get("out"), None)
    if out is None:
        raise UsageError("generate-data needs --out")
    if split not in SPLIT_KINDS:
        raise UsageError(f"unknown split {split!r}; expected one of {SPLIT_KINDS}")
    _announce("generate-data", {"split": split, "out": str(out), "seed": seed})
    generate_data(split, out, seed)
    return 0


def _cmd_train(args) -> int:
    file_cfg = _load_config_file(args.config)
    mask_raw = _resolve(args.mask, file_cfg.get("mask"), "none")
    mask_mode, window = _parse_mask(mask_raw)
    arch = _resolve(args.arch, file_cfg.get("arch"), "vanilla")
    if arch not in ("vanilla", "attention"):
        raise UsageError(f"arch must be vanilla or attention, got {arch!r}")
    attention = arch == "attention"
    if mask_mode != "none" and not attention:
        raise UsageError("attention masks require --arch attention")
    model = ModelConfig(
        vocab_in=input_vocabulary().size,
        vocab_out=output_vocabulary().size,
        embedding_dim=_resolve(args.embedding, file_cfg.get("embedding_dim"), 128),
        hidden_dim=_resolve(args.hidden, file_cfg.get("hidden_dim"), 128),
        attention=attention,
        mask_mode=mask_mode,
        window=window,
        anticipation_weight=_resolve(args.anticipation, file_cfg.get("anticipation_weight"), 0.0),
    )
    config = TrainConfig(
        model=model,
        split=SplitSpec(_resolve(args.split, file_cfg.get("split"), "add_prim_jump")),
        epochs=_resolve(args.epochs, file_cfg.get("epochs"), 50),
        lr=_resolve(args.lr, file_cfg.get("lr"), 0.001),
        batch_size=_resolve(args.batch_size, file_cfg.get("batch_size"), 128),
        n_seeds=_resolve(args.seeds, file_cfg.get("n_seeds"), 15),
        base_seed=_resolve(_env_seed(), _resolve(args.base_seed, file_cfg.get("base_seed"), None), 0),
    )
    out = _resolve(args.out, file_cfg.get("out"), None)
    if out is None:
        raise UsageError("train needs --out")
    jobs = _resolve(args.jobs, file_cfg.get("jobs"), 1)
    resolved = config.to_dict() | {"out": str(out), "jobs": jobs, "arch": arch}
    _announce("train", resolved)
    data_dir = _resolve(args.data, file_cfg.get("data"), None)
    if data_dir is not None:
        train_set = load_official(Path(data_dir) / "train.txt")
        test_set = load_official(Path(data_dir) / "test.txt")
    else:
        train_set, test_set = _split_data(config.split.kind, config.base_seed)
    manifest = train_suite(train_set, test_set, config, out, jobs=jobs)
    for entry in manifest.entries:
        if "error" in entry:
            print(f"seed {entry['seed']}: FAILED ({entry['error']})")
        else:
            print(f"seed {entry['seed']}: acc={entry['test_seq_acc']:.4f} "
                  f"loss={entry['final_train_loss']:.4f} ({entry['wall_time_s']:.1f}s)")
    return 0


def _cmd_eval(args) -> int:
    file_cfg = _load_config_file(args.config)
    ckpt = _resolve(args.checkpoint, file_cfg.get("checkpoint"), None)
    data = _resolve(args.data, file_cfg.get("data"), None)
    if ckpt is None or data is None:
        raise UsageError("eval needs --checkpoint and --data")
    _announce("eval", {"checkpoint": str(ckpt), "data": str(data)})
    model = load_checkpoint(ckpt)
    examples = load_official(data)
    acc = sequence_accuracy(model, examples)
    result = {"sequence_accuracy": acc, "n_examples": len(examples)}
    print(json.dumps(result))
    if args.out:
        Path(args.out).write_text(json.dumps(result, indent=2) + "\n")
    return 0


def _cmd_probe(args) -> int:
    file_cfg = _load_config_file(args.config)
    dump_path = _resolve(args.dump, file_cfg.get("dump"), None)
    ckpt = _resolve(args.checkpoint, file_cfg.get("checkpoint"), None)
    out = _resolve(args.out, file_cfg.get("out"), None)
    metric = _resolve(args.metric, file_cfg.get("metric"), "all")
    if dump_path is None or out is None:
        raise UsageError("probe needs --dump and --out")
    if metric in ("intratio", "all") and ckpt is None:
        raise UsageError("probe --metric intratio/all needs --checkpoint")
    top_k = _resolve(args.top_k, file_cfg.get("top_k"), 5)
    order = _resolve(args.order, file_cfg.get("order"), 2)
    distance = _resolve(args.distance, file_cfg.get("distance"), "euclidean")
    resolved = {"dump": str(dump_path), "checkpoint": str(ckpt) if ckpt else None,
                "metric": metric, "weighted": bool(args.weighted), "top_k": top_k,
                "order": order, "distance": distance, "out": str(out)}
    _announce("probe", resolved)
    dump = load_dump(dump_path)
    results: dict = {}
    if metric in ("dc", "all"):
        dc = dc_accuracy(dump, DcConfig(k_top=top_k))
        results["dc_acc"] = dc.dc_acc
        results["wdc_acc"] = dc.wdc_acc
        results["dc_probes_trained"] = len(dc.probes)
        results["dc_probes_skipped"] = dc.skipped
    if metric in ("intratio", "all"):
        model = load_checkpoint(ckpt)
        if metric == "all" or not args.weighted:
            results["int_ratio"] = integration_ratio(model, dump, weighted=False).value
        if metric == "all" or args.weighted:
            results["weighted_int_ratio"] = integration_ratio(model, dump, weighted=True).value
    if metric in ("repsim", "all"):
        results["repr_sim"] = repr_similarity(dump, RepSimConfig(order=order, distance=distance))
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(json.dumps(results, indent=2, sort_keys=True) + "\n")
    print(json.dumps(results, sort_keys=True))
    return 0


def _cmd_report(args) -> int:
    file_cfg = _load_config_file(args.config)
    runs = _resolve(args.runs, file_cfg.get("runs"), None)
    out = _resolve(args.out, file_cfg.get("out"), None)
    if runs is None or out is None:
        raise UsageError("report needs --runs and --out")
    _announce("report", {"runs": str(runs), "out": str(out)})
    from .analysis import correlation_matrix
    from .metrics import MetricReport

    reports_path = Path(runs) / "reports.json"
    if not reports_path.exists():
        raise FileNotFoundError(
            f"{reports_path} missing; run the pipeline (or probe) first"
        )
    reports = [MetricReport.from_dict(d) for d in json.loads(reports_path.read_text())]
    traces_path = Path(runs) / "traces_raw.json"
    traces = json.loads(traces_path.read_text()) if traces_path.exists() else []
    matrix = correlation_matrix(reports) if len(reports) >= 2 else None
    emit_report(reports, matrix, traces, out)
    print(f"report files written to {out}")
    return 0


def _cmd_pipeline(args) -> int:
    file_cfg = _load_config_file(args.config)
    preset = _resolve(args.preset, file_cfg.get("preset"), "desk")
    if preset not in PRESETS:
        raise UsageError(f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
    overrides = {k: v for k, v in file_cfg.items() if k not in ("preset", "dc", "repsim")}
    if args.out is not None:
        base = Path(args.out)
        overrides["data_dir"] = str(base / "data")
        overrides["run_dir"] = str(base / "runs")
        overrides["report_dir"] = str(base / "reports")
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    env_seed = _env_seed()
    if env_seed is not None:
        overrides["base_seed"] = env_seed
    cfg = PipelineConfig.from_preset(preset, **overrides)
    if "dc" in file_cfg or "repsim" in file_cfg:
        cfg = PipelineConfig.from_dict(cfg.to_dict() | {
            k: file_cfg[k] for k in ("dc", "repsim") if k in file_cfg
        })
    _announce("pipeline", cfg.to_dict())
    run_pipeline(cfg, force=args.force)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="incrprobe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-data", help="enumerate a split and write train/test files")
    p.add_argument("--split", choices=SPLIT_KINDS, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(fn=_cmd_generate_data)

    p = sub.add_parser("train", help="train a multi-seed suite of one architecture")
    p.add_argument("--config", default=None)
    p.add_argument("--arch", choices=("vanilla", "attention"), default=None)
    p.add_argument("--mask", default=None, help="none | causal | local:<w>")
    p.add_argument("--anticipation", type=float, default=None, metavar="WEIGHT")
    p.add_argument("--seeds", type=int, default=None)
    p.add_argument("--base-seed", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--hidden", type=int, default=None)
    p.add_argument("--embedding", type=int, default=None)
    p.add_argument("--split", choices=SPLIT_KINDS, default=None)
    p.add_argument("--data", default=None, help="directory with train.txt/test.txt")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("eval", help="sequence accuracy of a checkpoint on a data file")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--data", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("probe", help="compute incrementality metrics from a dump")
    p.add_argument("--dump", default=None)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--metric", choices=("dc", "intratio", "repsim", "all"), default=None)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--distance", choices=("euclidean", "cosine"), default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(fn=_cmd_probe)

    p = sub.add_parser("report", help="emit CSV/JSON report files from a runs directory")
    p.add_argument("--runs", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("pipeline", help="data -> train -> dump -> metrics -> report")
    p.add_argument("--preset", choices=tuple(sorted(PRESETS)), default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None, help="base directory for data/runs/reports")
    p.add_argument("--force", action="store_true")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(fn=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
