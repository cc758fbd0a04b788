"""
事件日志统计与过滤
"""

import logging
from dataclasses import asdict, dataclass

import pandas as pd

from pgtnet.errors import EmptyLog
from pgtnet.eventlog.model import EventLog
from pgtnet.utils.utils import SECONDS_PER_DAY

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LogStatistics:
    cases: int
    events: int
    event_classes: int
    variants: int
    variants_per_case: float
    avg_case_length: float
    max_case_length: int
    avg_case_duration_days: float
    max_case_duration_days: float

    def to_dict(self) -> dict:
        return asdict(self)


def filter_short_traces(log: EventLog, min_events: int = 3) -> EventLog:
    """
    Keep the traces with at least ``min_events`` events, in log order.

    Args:
        log: 事件日志
        min_events: 最少事件数（默认 3，长度为 2 的前缀才能构图）

    Returns:
        过滤后的 EventLog

    Raises:
        EmptyLog: 没有 trace 保留下来
    """
    if min_events < 1:
        raise ValueError(f"min_events must be positive, got {min_events}")
    kept = tuple(t for t in log.traces if len(t) >= min_events)
    if not kept:
        raise EmptyLog(f"no trace has at least {min_events} events")
    dropped = len(log) - len(kept)
    if dropped:
        logger.info("过滤短 trace: 移除 %d 个 (< %d 个事件), 保留 %d 个", dropped, min_events, len(kept))
    return EventLog(kept, log.schema)


def log_statistics(log: EventLog) -> LogStatistics:
    """
    Summary counts of a log: cases, events, event classes, variants, case
    lengths and case durations (days).
    """
    if not len(log):
        raise EmptyLog("cannot summarise an empty log")
    per_case = pd.DataFrame({
        "length": [len(t) for t in log.traces],
        "duration": [t.duration_seconds for t in log.traces],
        "variant": [t.variant for t in log.traces],
    })
    classes = {cls for t in log.traces for cls in t.variant}
    variants = per_case["variant"].nunique()
    return LogStatistics(
        cases=len(per_case),
        events=int(per_case["length"].sum()),
        event_classes=len(classes),
        variants=int(variants),
        variants_per_case=float(variants) / len(per_case),
        avg_case_length=float(per_case["length"].mean()),
        max_case_length=int(per_case["length"].max()),
        avg_case_duration_days=float(per_case["duration"].mean()) / SECONDS_PER_DAY,
        max_case_duration_days=float(per_case["duration"].max()) / SECONDS_PER_DAY,
    )
