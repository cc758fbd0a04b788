"""
评估指标

MAE in days overall and per prefix length, relative MAE against the average
case duration, and mean ± sample standard deviation across runs.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from pgtnet.errors import LengthMismatch
from pgtnet.prefixing import EventPrefixRecord
from pgtnet.utils.utils import SECONDS_PER_DAY


@dataclass(frozen=True)
class PrefixBucket:
    count: int
    mae_days: float


@dataclass
class EvaluationReport:
    """
    评估报告

    ``per_prefix_length`` maps k to (count, MAE in days); counts sum to the
    number of evaluated records.
    """
    mae_days: float
    relative_mae: float
    per_prefix_length: Dict[int, PrefixBucket]
    num_records: int
    per_fold: List["EvaluationReport"] = field(default_factory=list)

    @property
    def relative_mae_percent(self) -> float:
        return 100.0 * self.relative_mae

    def to_dict(self) -> dict:
        return {
            "mae_days": self.mae_days,
            "relative_mae": self.relative_mae,
            "relative_mae_percent": self.relative_mae_percent,
            "num_records": self.num_records,
            "per_prefix_length": {
                str(k): {"count": b.count, "mae_days": b.mae_days}
                for k, b in sorted(self.per_prefix_length.items())
            },
            "per_fold": [r.to_dict() for r in self.per_fold],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "EvaluationReport":
        return cls(
            mae_days=float(raw["mae_days"]),
            relative_mae=float(raw["relative_mae"]),
            per_prefix_length={
                int(k): PrefixBucket(int(v["count"]), float(v["mae_days"]))
                for k, v in raw["per_prefix_length"].items()
            },
            num_records=int(raw["num_records"]),
            per_fold=[cls.from_dict(r) for r in raw.get("per_fold", [])],
        )


def evaluate(
        predictions: Sequence[float],
        records: Sequence[EventPrefixRecord],
        avg_case_duration_days: Optional[float] = None,
) -> EvaluationReport:
    """
    计算 MAE 报告

    Args:
        predictions: 预测剩余时间（秒），与 records 对齐
        records: 测试前缀
        avg_case_duration_days: 相对 MAE 的分母（整个日志的平均 case 时长，天）

    Returns:
        EvaluationReport

    Raises:
        LengthMismatch: predictions 与 records 长度不一致
    """
    predictions = np.asarray(predictions, dtype=np.float64)
    if predictions.shape[0] != len(records):
        raise LengthMismatch(f"{predictions.shape[0]} predictions for {len(records)} records")
    if not records:
        raise LengthMismatch("cannot evaluate an empty set of records")
    frame = pd.DataFrame({
        "k": [r.k for r in records],
        "error_days": np.abs(predictions - np.array([r.remaining_seconds for r in records])) / SECONDS_PER_DAY,
    })
    mae = float(frame["error_days"].mean())
    grouped = frame.groupby("k", sort=True)["error_days"].agg(["count", "mean"])
    buckets = {int(k): PrefixBucket(int(row["count"]), float(row["mean"])) for k, row in grouped.iterrows()}
    relative = mae / avg_case_duration_days if avg_case_duration_days else math.nan
    return EvaluationReport(mae, relative, buckets, len(records))


@dataclass(frozen=True)
class Aggregate:
    mean: float
    std: float
    runs: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "runs": self.runs}


def aggregate(values: Sequence[float]) -> Aggregate:
    """Mean and sample standard deviation (n − 1); a single run has std 0."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("cannot aggregate zero runs")
    std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return Aggregate(float(np.mean(values)), std, int(values.size))


def average_reports(reports: Sequence[EvaluationReport]) -> EvaluationReport:
    """
    Average reports computed over the same records (e.g. one per seed).

    MAE values are averaged; per-k counts must agree and are kept.
    """
    if not reports:
        raise ValueError("no reports to average")
    first = reports[0]
    for other in reports[1:]:
        if {k: b.count for k, b in other.per_prefix_length.items()} != {k: b.count for k, b in first.per_prefix_length.items()}:
            raise LengthMismatch("reports cover different prefix-length buckets")
    buckets = {
        k: PrefixBucket(b.count, float(np.mean([r.per_prefix_length[k].mae_days for r in reports])))
        for k, b in first.per_prefix_length.items()
    }
    return EvaluationReport(
        mae_days=float(np.mean([r.mae_days for r in reports])),
        relative_mae=float(np.mean([r.relative_mae for r in reports])),
        per_prefix_length=buckets,
        num_records=first.num_records,
    )
