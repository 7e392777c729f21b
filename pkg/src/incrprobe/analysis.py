"""Cross-run statistics and report emission."""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metrics.report import METRIC_NAMES, MetricReport


class ConstantInputError(ValueError):
    """Pearson correlation is undefined for a constant sequence."""


def pearson(xs, ys) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two flat sequences of equal length")
    if x.size < 2:
        raise ValueError("pearson needs at least two samples")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float((dx * dx).sum())
    sy = float((dy * dy).sum())
    if sx == 0.0 or sy == 0.0:
        raise ConstantInputError("correlation undefined for a constant input")
    return float((dx * dy).sum() / math.sqrt(sx * sy))


@dataclass
class CorrelationMatrix:
    names: tuple[str, ...]
    rho: np.ndarray          # NaN marks undefined cells
    n_samples: int

    def value(self, a: str, b: str) -> float:
        return float(self.rho[self.names.index(a), self.names.index(b)])


def correlation_matrix(reports: list[MetricReport], names=METRIC_NAMES) -> CorrelationMatrix:
    """Pairwise Pearson rho over all runs, architectures pooled."""
    if len(reports) < 2:
        raise ValueError("need at least two runs to correlate")
    names = tuple(names)
    columns = {n: [r.value(n) for r in reports] for n in names}
    k = len(names)
    rho = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            try:
                v = pearson(columns[names[i]], columns[names[j]])
            except ConstantInputError:
                v = float("nan")
            rho[i, j] = rho[j, i] = v
    return CorrelationMatrix(names, rho, len(reports))


def majority_vote(decodings: list) -> tuple:
    """Most frequent full sequence; ties go to the earliest (lowest seed)."""
    if not decodings:
        raise ValueError("majority_vote over an empty list")
    seqs = [tuple(d) for d in decodings]
    counts = Counter(seqs)
    best = max(counts.values())
    for s in seqs:  # input order breaks ties
        if counts[s] == best:
            return s
    raise AssertionError("unreachable")


def emit_report(reports: list[MetricReport], matrix: CorrelationMatrix | None,
                traces: list[dict], out_dir) -> None:
    """Write metrics.csv, correlations.csv and traces.json under out_dir.

    Trace entries are {"arch", "seed", "command": [words], "trace": [[t, ratio]]}.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "metrics.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["arch", "seed", "metric", "value"])
        for r in reports:
            for name in METRIC_NAMES:
                writer.writerow([r.arch, r.seed, name, repr(r.value(name))])
    with (out_dir / "correlations.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        if matrix is None:
            writer.writerow(["metric"])
        else:
            writer.writerow(["metric", *matrix.names])
            for i, name in enumerate(matrix.names):
                writer.writerow([name, *[repr(float(v)) for v in matrix.rho[i]]])
    (out_dir / "traces.json").write_text(json.dumps(traces, indent=2) + "\n")


def load_metrics_csv(path) -> list[MetricReport]:
    """Inverse of the metrics.csv emission."""
    rows: dict[tuple[str, int], dict] = {}
    with Path(path).open("r", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["arch"], int(row["seed"]))
            rows.setdefault(key, {})[row["metric"]] = float(row["value"])
    return [
        MetricReport(arch=arch, seed=seed, **vals)
        for (arch, seed), vals in sorted(rows.items())
    ]
