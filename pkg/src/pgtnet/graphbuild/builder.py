"""
前缀 → 有向属性图

Nodes are the distinct event classes of a prefix, edges its directly-follows
relations; all per-occurrence information is carried as edge features.
"""

import logging
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from pgtnet.eventlog.model import AttributeKind, AttributeScope, EventLog, event_class_of
from pgtnet.graphbuild.layout import FeatureLayout, layout_from_stats
from pgtnet.graphbuild.stats import NormalizationStats
from pgtnet.prefixing import EventPrefixRecord
from pgtnet.utils.utils import SECONDS_PER_DAY, SECONDS_PER_WEEK

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PrefixGraph:
    node_class_ids: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    edge_features: Tuple[Tuple[float, ...], ...]
    target_normalized: float
    case_id: str
    k: int
    encodings: Optional[Any] = None

    @property
    def num_nodes(self) -> int:
        return len(self.node_class_ids)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def with_encodings(self, encodings) -> "PrefixGraph":
        return replace(self, encodings=encodings)


class DirectlyFollows(NamedTuple):
    """Distinct DF pairs of a node sequence, with counts and last-occurrence positions."""
    pairs: np.ndarray        # (m, 2) node index pairs, lexicographically sorted
    counts: np.ndarray       # (m,)
    last_position: np.ndarray  # (m,) index i of the last occurrence (e_i, e_{i+1})
    occurrence: np.ndarray   # (k-1,) pair index of every consecutive position


def directly_follows(node_sequence: Sequence[int]) -> DirectlyFollows:
    seq = np.asarray(node_sequence, dtype=np.int64)
    if seq.size < 2:
        empty = np.zeros(0, dtype=np.int64)
        return DirectlyFollows(np.zeros((0, 2), dtype=np.int64), empty, empty, empty)
    consecutive = np.stack([seq[:-1], seq[1:]], axis=1)
    pairs, inverse, counts = np.unique(consecutive, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    last = np.full(len(pairs), -1, dtype=np.int64)
    np.maximum.at(last, inverse, np.arange(len(consecutive)))
    return DirectlyFollows(pairs, counts, last, inverse)


def seconds_since_midnight(ts: datetime) -> float:
    return ts.hour * 3600 + ts.minute * 60 + ts.second + ts.microsecond / 1e6


def seconds_since_monday(ts: datetime) -> float:
    return ts.weekday() * SECONDS_PER_DAY + seconds_since_midnight(ts)


def min_max(value, bounds: Tuple[float, float]) -> float:
    """Min-max scaling without clamping; missing values and zero-width ranges give 0."""
    if value is None:
        return 0.0
    low, high = bounds
    if high <= low:
        return 0.0
    return (float(value) - low) / (high - low)


def encode_attributes(
        values: Mapping[str, Any],
        stats: NormalizationStats,
        scope: AttributeScope,
) -> List[float]:
    """Numeric block then one-hot block of one scope; unseen categories give all-zeros."""
    encoded = [min_max(values.get(name), stats.numeric_ranges[name])
               for name in stats.attribute_names(AttributeKind.NUMERIC, scope)]
    for name in stats.attribute_names(AttributeKind.CATEGORICAL, scope):
        vocab = stats.categorical_vocabs[name]
        one_hot = [0.0] * len(vocab)
        value = values.get(name)
        if value is not None and str(value) in vocab:
            one_hot[vocab.index(str(value))] = 1.0
        encoded.extend(one_hot)
    return encoded


def build_graph(
        record: EventPrefixRecord,
        stats: NormalizationStats,
        case_attrs: Optional[Mapping[str, Any]] = None,
        layout: Optional[FeatureLayout] = None,
) -> PrefixGraph:
    """
    构建前缀图

    Args:
        record: 前缀记录 (k ≥ 2)
        stats: 训练集统计量
        case_attrs: case 级属性；为空时取前缀首事件上的 case 级属性
        layout: 预先计算的特征布局

    Returns:
        PrefixGraph
    """
    layout = layout or layout_from_stats(stats)
    events = record.events
    scopes = stats.attribute_scopes
    if case_attrs is None:
        case_attrs = {k: v for k, v in events[0].attrs.items() if scopes.get(k) == AttributeScope.CASE}

    node_of: Dict = {}
    for event in events:
        node_of.setdefault(event_class_of(event), len(node_of))
    node_sequence = [node_of[event_class_of(e)] for e in events]

    seconds = np.array([e.seconds for e in events])
    gaps = seconds[1:] - seconds[:-1]
    df = directly_follows(node_sequence)
    total_gap = np.bincount(df.occurrence, weights=gaps, minlength=len(df.pairs))

    max_duration = stats.max_case_duration_seconds
    case_block = encode_attributes(case_attrs, stats, AttributeScope.CASE)

    features = []
    for idx in range(len(df.pairs)):
        i = int(df.last_position[idx])
        target = events[i + 1]
        event_attrs = {k: v for k, v in target.attrs.items() if scopes.get(k) == AttributeScope.EVENT}
        vector = [
            float(df.counts[idx]) / stats.max_df_count,
            float(total_gap[idx]) / max_duration,
            float(gaps[i]) / max_duration,
            (seconds[i + 1] - seconds[0]) / max_duration,
            seconds_since_midnight(target.timestamp) / SECONDS_PER_DAY,
            seconds_since_monday(target.timestamp) / SECONDS_PER_WEEK,
            *case_block,
            *encode_attributes(event_attrs, stats, AttributeScope.EVENT),
            stats.active_cases(seconds[i + 1]) / stats.max_concurrent_cases,
        ]
        features.append(tuple(float(x) for x in vector))

    if features and len(features[0]) != layout.width:
        raise ValueError(f"edge vector has {len(features[0])} entries, layout expects {layout.width}")

    return PrefixGraph(
        node_class_ids=tuple(stats.class_id(cls) for cls in node_of),
        edges=tuple((int(s), int(t)) for s, t in df.pairs),
        edge_features=tuple(features),
        target_normalized=record.remaining_seconds / max_duration,
        case_id=record.case_id,
        k=record.k,
    )


def build_dataset(
        records: Sequence[EventPrefixRecord],
        stats: NormalizationStats,
        log: Optional[EventLog] = None,
) -> List[PrefixGraph]:
    """Map build_graph over ``records`` in order; case attributes come from ``log`` when given."""
    layout = layout_from_stats(stats)
    graphs = []
    for record in records:
        case_attrs = log.case_attributes(record.case_id) if log is not None else None
        graphs.append(build_graph(record, stats, case_attrs, layout))
    logger.info("构建图数据集: %d 个图, 边特征维度 %d", len(graphs), layout.width)
    return graphs
