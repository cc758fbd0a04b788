"""
Earliness 分析：按前缀长度的 MAE
"""

import logging
from pathlib import Path
from typing import Mapping

import pandas as pd

from pgtnet.evaluation.metrics import EvaluationReport, PrefixBucket

logger = logging.getLogger(__name__)

EARLINESS_COLUMNS = ("k", "count", "mae_days", "cutoff")
DEFAULT_COVERAGE = 0.9


def earliness_cutoff(buckets: Mapping[int, PrefixBucket], coverage: float = DEFAULT_COVERAGE) -> int:
    """Smallest k whose cumulative prefix count reaches ``coverage`` of all prefixes."""
    if not buckets:
        raise ValueError("no prefix-length buckets")
    total = sum(b.count for b in buckets.values())
    running = 0
    for k in sorted(buckets):
        running += buckets[k].count
        if running >= coverage * total:
            return k
    return max(buckets)


def earliness_frame(report: EvaluationReport, coverage: float = DEFAULT_COVERAGE) -> pd.DataFrame:
    buckets = {k: b for k, b in report.per_prefix_length.items() if b.count > 0}
    cutoff = earliness_cutoff(buckets, coverage)
    rows = [
        {"k": k, "count": b.count, "mae_days": b.mae_days, "cutoff": int(k == cutoff)}
        for k, b in sorted(buckets.items())
    ]
    return pd.DataFrame(rows, columns=list(EARLINESS_COLUMNS))


def emit_earliness_table(report: EvaluationReport, path, coverage: float = DEFAULT_COVERAGE) -> Path:
    """
    写出 earliness.csv

    Columns k, count, mae_days, cutoff; ``cutoff`` is 1 on the prefix length
    that covers ``coverage`` of all test prefixes and 0 elsewhere.
    """
    path = Path(path)
    frame = earliness_frame(report, coverage)
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.17g")
    logger.info("写出 earliness 表 %s (%d 行)", path, len(frame))
    return path
