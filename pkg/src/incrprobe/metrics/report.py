"""Per-run metric bundle."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ..model import Seq2Seq
from ..trainer.activations import ActivationDump
from .dc import DcConfig, dc_accuracy
from .integration import integration_ratio
from .repsim import RepSimConfig, repr_similarity

METRIC_NAMES = ("seq_acc", "dc_acc", "wdc_acc", "int_ratio", "weighted_int_ratio", "repr_sim")


@dataclass(frozen=True)
class MetricReport:
    arch: str
    seed: int
    seq_acc: float
    dc_acc: float
    wdc_acc: float
    int_ratio: float
    weighted_int_ratio: float
    repr_sim: float

    def __post_init__(self):
        for name in METRIC_NAMES:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        for name in ("seq_acc", "dc_acc", "wdc_acc"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    def value(self, metric: str) -> float:
        if metric not in METRIC_NAMES:
            raise KeyError(f"unknown metric {metric!r}")
        return getattr(self, metric)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        return cls(**d)


def compute_report(arch: str, seed: int, model: Seq2Seq, dump: ActivationDump,
                   seq_acc: float, dc_cfg: DcConfig = DcConfig(),
                   rs_cfg: RepSimConfig = RepSimConfig()) -> MetricReport:
    """All incrementality metrics for one trained model."""
    dc = dc_accuracy(dump, dc_cfg)
    return MetricReport(
        arch=arch,
        seed=seed,
        seq_acc=seq_acc,
        dc_acc=dc.dc_acc,
        wdc_acc=dc.wdc_acc,
        int_ratio=integration_ratio(model, dump, weighted=False).value,
        weighted_int_ratio=integration_ratio(model, dump, weighted=True).value,
        repr_sim=repr_similarity(dump, rs_cfg),
    )
