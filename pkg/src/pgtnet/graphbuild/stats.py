"""
训练集归一化统计量

Every normalization constant of the graph transformation is fitted here on the
training fold only and frozen for validation/test graphs.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from pgtnet.errors import DegenerateStat
from pgtnet.eventlog.model import (
    AttributeKind,
    AttributeSchema,
    AttributeScope,
    EventClass,
    EventLog,
    event_class_of,
)
from pgtnet.prefixing import EventPrefixRecord

logger = logging.getLogger(__name__)

UNKNOWN_CLASS_ID = 0


@dataclass(frozen=True)
class NormalizationStats:
    """
    Training-fold statistics.

    ``event_class_vocab`` lists the known event classes in sorted order; class
    ``i`` of the list has id ``i + 1`` and id 0 is reserved for unseen classes.
    ``case_starts``/``case_ends`` are the sorted first/last timestamps (POSIX
    seconds) of the training cases, used to count active cases.
    """
    max_df_count: int
    max_case_duration_seconds: float
    numeric_ranges: Mapping[str, Tuple[float, float]]
    categorical_vocabs: Mapping[str, Tuple[str, ...]]
    max_concurrent_cases: int
    event_class_vocab: Tuple[EventClass, ...]
    attribute_scopes: Mapping[str, AttributeScope]
    case_starts: Tuple[float, ...] = ()
    case_ends: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.max_df_count <= 0 or self.max_case_duration_seconds <= 0 or self.max_concurrent_cases <= 0:
            raise DegenerateStat("normalization maxima must be positive")
        for name, (low, high) in self.numeric_ranges.items():
            if low > high:
                raise ValueError(f"numeric range of {name!r} has min > max")
        object.__setattr__(self, "_class_ids", {cls: i + 1 for i, cls in enumerate(self.event_class_vocab)})
        object.__setattr__(self, "_starts", np.asarray(self.case_starts, dtype=float))
        object.__setattr__(self, "_ends", np.asarray(self.case_ends, dtype=float))

    @property
    def vocab_size(self) -> int:
        """Number of embedding rows: known classes plus UNKNOWN."""
        return len(self.event_class_vocab) + 1

    def class_id(self, event_class: EventClass) -> int:
        return self._class_ids.get(event_class, UNKNOWN_CLASS_ID)

    def attribute_names(self, kind: AttributeKind, scope: AttributeScope) -> Tuple[str, ...]:
        pool = self.numeric_ranges if kind == AttributeKind.NUMERIC else self.categorical_vocabs
        return tuple(sorted(n for n in pool if self.attribute_scopes[n] == scope))

    def active_cases(self, seconds: float) -> int:
        """Training cases whose closed interval [first event, last event] contains ``seconds``."""
        started = int(np.searchsorted(self._starts, seconds, side="right"))
        finished = int(np.searchsorted(self._ends, seconds, side="left"))
        return started - finished

    # ==================== 序列化 ====================

    def to_dict(self) -> dict:
        return {
            "max_df_count": self.max_df_count,
            "max_case_duration_seconds": self.max_case_duration_seconds,
            "numeric_ranges": {k: list(v) for k, v in sorted(self.numeric_ranges.items())},
            "categorical_vocabs": {k: list(v) for k, v in sorted(self.categorical_vocabs.items())},
            "max_concurrent_cases": self.max_concurrent_cases,
            "event_class_vocab": [cls.to_list() for cls in self.event_class_vocab],
            "attribute_scopes": {k: v.value for k, v in sorted(self.attribute_scopes.items())},
            "case_starts": list(self.case_starts),
            "case_ends": list(self.case_ends),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "NormalizationStats":
        return cls(
            max_df_count=int(raw["max_df_count"]),
            max_case_duration_seconds=float(raw["max_case_duration_seconds"]),
            numeric_ranges={k: (float(v[0]), float(v[1])) for k, v in raw["numeric_ranges"].items()},
            categorical_vocabs={k: tuple(v) for k, v in raw["categorical_vocabs"].items()},
            max_concurrent_cases=int(raw["max_concurrent_cases"]),
            event_class_vocab=tuple(EventClass.from_list(c) for c in raw["event_class_vocab"]),
            attribute_scopes={k: AttributeScope(v) for k, v in raw["attribute_scopes"].items()},
            case_starts=tuple(float(x) for x in raw["case_starts"]),
            case_ends=tuple(float(x) for x in raw["case_ends"]),
        )


def max_df_count_of(class_sequence: Sequence) -> int:
    """Largest number of occurrences of any directly-follows pair in one sequence."""
    counts = Counter(zip(class_sequence[:-1], class_sequence[1:]))
    return max(counts.values(), default=0)


def max_concurrency(starts: np.ndarray, ends: np.ndarray, probes: np.ndarray) -> int:
    """Max over ``probes`` of the number of closed intervals [start, end] containing the probe."""
    starts = np.sort(starts)
    ends = np.sort(ends)
    active = np.searchsorted(starts, probes, side="right") - np.searchsorted(ends, probes, side="left")
    return int(active.max(initial=0))


def fit_stats(
        train_records: Sequence[EventPrefixRecord],
        log: EventLog,
        schema: Optional[AttributeSchema] = None,
) -> NormalizationStats:
    """
    拟合训练集统计量

    Args:
        train_records: 训练集前缀
        log: 事件日志（用于训练 case 的完整 trace）
        schema: 属性 schema，默认取 log.schema

    Returns:
        NormalizationStats

    Raises:
        DegenerateStat: 任一最大值为 0
    """
    if not train_records:
        raise ValueError("fit_stats needs at least one training record")
    schema = schema or log.schema

    # nested prefixes: the longest prefix of a case bounds every shorter one
    longest: Dict[str, EventPrefixRecord] = {}
    for record in train_records:
        if record.case_id not in longest or record.k > longest[record.case_id].k:
            longest[record.case_id] = record
    max_df = max(max_df_count_of([event_class_of(e) for e in r.events]) for r in longest.values())

    traces = [log.trace(case_id) for case_id in longest]
    max_duration = max(t.duration_seconds for t in traces)
    if max_df <= 0:
        raise DegenerateStat("no directly-follows relation in the training prefixes")
    if max_duration <= 0:
        raise DegenerateStat("every training case has zero duration; the log cannot be normalized")

    numeric_ranges: Dict[str, Tuple[float, float]] = {}
    categorical_values: Dict[str, set] = {}
    for trace in traces:
        for event in trace.events:
            for name, value in event.attrs.items():
                spec = schema.attributes.get(name)
                if spec is None:
                    continue
                if spec.kind == AttributeKind.NUMERIC:
                    low, high = numeric_ranges.get(name, (value, value))
                    numeric_ranges[name] = (min(low, value), max(high, value))
                else:
                    categorical_values.setdefault(name, set()).add(value)
    # declared attributes never observed in training still get a (zero-width) slot
    for name, spec in schema.attributes.items():
        if spec.kind == AttributeKind.NUMERIC:
            numeric_ranges.setdefault(name, (0.0, 0.0))
        else:
            categorical_values.setdefault(name, set())

    starts = np.array([t.events[0].seconds for t in traces])
    ends = np.array([t.events[-1].seconds for t in traces])
    probes = np.array([e.seconds for t in traces for e in t.events])
    max_concurrent = max_concurrency(starts, ends, probes)

    vocab = sorted({event_class_of(e) for r in train_records for e in r.events})

    stats = NormalizationStats(
        max_df_count=max_df,
        max_case_duration_seconds=max_duration,
        numeric_ranges=numeric_ranges,
        categorical_vocabs={k: tuple(sorted(v)) for k, v in categorical_values.items()},
        max_concurrent_cases=max_concurrent,
        event_class_vocab=tuple(vocab),
        attribute_scopes={name: spec.scope for name, spec in schema.attributes.items()},
        case_starts=tuple(np.sort(starts).tolist()),
        case_ends=tuple(np.sort(ends).tolist()),
    )
    logger.info(
        "拟合统计量: max(DF)=%d, 最长 case %.1f 天, 最大并发 %d, %d 个事件类",
        max_df, max_duration / 86400.0, max_concurrent, len(vocab),
    )
    return stats
