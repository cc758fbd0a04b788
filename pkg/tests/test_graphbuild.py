from collections import Counter

import numpy as np
import pytest

from pgtnet.encodings import encode_dataset
from pgtnet.errors import DegenerateStat, SchemaVersionMismatch
from pgtnet.eventlog.model import AttributeKind, AttributeSchema, AttributeScope, AttributeSpec, EventClass
from pgtnet.graphbuild import (
    UNKNOWN_CLASS_ID,
    NormalizationStats,
    build_dataset,
    build_graph,
    directly_follows,
    fit_stats,
    layout_from_stats,
    read_dataset,
    read_stats,
    write_dataset,
    write_stats,
)
from pgtnet.prefixing import EventPrefixRecord, build_prefixes

from conftest import AMOUNT_SCHEMA, T0, build_trace


def _fig1_stats(classes):
    return NormalizationStats(
        max_df_count=10,
        max_case_duration_seconds=30 * 86400.0,
        numeric_ranges={"amount": (0.0, 50000.0)},
        categorical_vocabs={"channel": ("email", "web")},
        max_concurrent_cases=4,
        event_class_vocab=tuple(sorted(classes)),
        attribute_scopes={"amount": AttributeScope.CASE, "channel": AttributeScope.CASE},
        case_starts=(T0.timestamp(),),
        case_ends=(T0.timestamp() + 30 * 86400.0,),
    )


def _record(trace, k, end_hours=100.0):
    end = trace.events[0].seconds + end_hours * 3600
    return EventPrefixRecord(trace.case_id, k, trace.events[:k], end - trace.events[k - 1].seconds)


def test_fig1_weight_and_case_attribute():
    activities = ["A-SUBMITTED", "A-PARTLYSUBMITTED", "A-PREACCEPTED", "W-Completeren aanvraag",
                  "A-ACCEPTED", "O-SELECTED"]
    trace = build_trace("27583", activities, [0, 1, 2, 3, 4, 5],
                        attrs={"amount": 12000.0, "channel": "web"}, lifecycle="COMPLETE")
    stats = _fig1_stats({e.event_class for e in trace.events})
    graph = build_graph(_record(trace, 6), stats)
    layout = layout_from_stats(stats)
    weight = layout.block("weight").start
    amount = layout.block("case_numeric:amount").start
    channel = layout.block("case_onehot:channel")
    assert graph.num_nodes == 6
    assert graph.num_edges == 5
    for features in graph.edge_features:
        assert features[weight] == pytest.approx(0.1)
        assert features[amount] == pytest.approx(0.24)
        assert list(features[channel.start:channel.stop]) == [0.0, 1.0]


def test_repeated_class_self_loop():
    trace = build_trace("c", ["A", "A", "B"], [0, 1, 2])
    stats = _fig1_stats({EventClass("A"), EventClass("B")})
    graph = build_graph(_record(trace, 2), stats)
    assert graph.num_nodes == 1
    assert graph.edges == ((0, 0),)
    assert graph.edge_features[0][0] == pytest.approx(1 / 10)


def test_unseen_class_maps_to_unknown():
    trace = build_trace("c", ["A", "Z"], [0, 1])
    stats = _fig1_stats({EventClass("A")})
    graph = build_graph(_record(trace, 2), stats)
    assert graph.node_class_ids == (1, UNKNOWN_CLASS_ID)


def test_directly_follows_against_naive_scan():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        seq = rng.integers(0, 4, size=int(rng.integers(2, 13))).tolist()
        df = directly_follows(seq)
        pairs = list(zip(seq[:-1], seq[1:]))
        expected_counts = Counter(pairs)
        expected_last = {p: max(i for i, q in enumerate(pairs) if q == p) for p in expected_counts}
        got = {tuple(p): (int(c), int(last)) for p, c, last in zip(df.pairs.tolist(), df.counts, df.last_position)}
        assert got == {p: (expected_counts[p], expected_last[p]) for p in expected_counts}


def test_graph_edges_against_naive_scan(jittered_log):
    records = build_prefixes(jittered_log)
    stats = fit_stats(records, jittered_log)
    for record in records:
        graph = build_graph(record, stats)
        node_of = {}
        for event in record.events:
            node_of.setdefault(event.event_class, len(node_of))
        seq = [node_of[e.event_class] for e in record.events]
        counts = Counter(zip(seq[:-1], seq[1:]))
        assert set(graph.edges) == set(counts)
        assert graph.num_nodes == len(node_of)
        for edge, features in zip(graph.edges, graph.edge_features):
            assert features[0] == pytest.approx(counts[edge] / stats.max_df_count)


def test_temporal_features_in_range(jittered_log):
    records = build_prefixes(jittered_log)
    stats = fit_stats(records, jittered_log)
    graphs = build_dataset(records, stats, jittered_log)
    width = layout_from_stats(stats).width
    for graph, record in zip(graphs, records):
        assert graph.target_normalized == pytest.approx(record.remaining_seconds / stats.max_case_duration_seconds)
        for features in graph.edge_features:
            assert len(features) == width
            t1, t2, t3, t4, t5 = features[1:6]
            assert min(t1, t2, t3) >= 0
            assert 0 <= t4 < 1 and 0 <= t5 < 1


def test_concurrency_against_sweep(jittered_log):
    records = build_prefixes(jittered_log)
    stats = fit_stats(records, jittered_log)
    intervals = [(t.events[0].seconds, t.events[-1].seconds) for t in jittered_log]
    probes = [e.seconds for t in jittered_log for e in t]
    naive = max(sum(1 for s, e in intervals if s <= p <= e) for p in probes)
    assert stats.max_concurrent_cases == naive


def test_stats_vocabularies_sorted(synthetic_log):
    stats = fit_stats(build_prefixes(synthetic_log), synthetic_log)
    assert list(stats.event_class_vocab) == sorted(set(stats.event_class_vocab))
    assert stats.categorical_vocabs["channel"] == tuple(sorted(stats.categorical_vocabs["channel"]))
    low, high = stats.numeric_ranges["amount"]
    assert low <= high


def test_degenerate_duration(make_log):
    trace = build_trace("c", ["A", "B", "C"], [0, 0, 0])
    log = make_log([trace])
    with pytest.raises(DegenerateStat):
        fit_stats(build_prefixes(log), log)


def test_dataset_round_trip(tmp_path, synthetic_log):
    records = build_prefixes(synthetic_log)
    stats = fit_stats(records, synthetic_log)
    graphs = encode_dataset(build_dataset(records, stats, synthetic_log), 4, 3)
    path = write_dataset(graphs, tmp_path / "dataset.jsonl", manifest_hash="h")
    assert read_dataset(path) == graphs

    stats_path = write_stats(stats, tmp_path / "stats.json")
    assert read_stats(stats_path) == stats


def test_empty_dataset_round_trip(tmp_path):
    assert read_dataset(write_dataset([], tmp_path / "empty.jsonl")) == []


def test_dataset_version_mismatch(tmp_path):
    path = tmp_path / "old.jsonl"
    path.write_text('{"schema_version":"pgtnet-graphs/0","count":0}\n', encoding="utf-8")
    with pytest.raises(SchemaVersionMismatch):
        read_dataset(path)


def test_build_dataset_idempotent(synthetic_log):
    records = build_prefixes(synthetic_log)
    stats = fit_stats(records, synthetic_log)
    assert build_dataset(records, stats, synthetic_log) == build_dataset(records, stats, synthetic_log)


def test_declared_but_unseen_attribute_gets_slot(make_log):
    schema = AttributeSchema(attributes={
        **AMOUNT_SCHEMA.attributes,
        "priority": AttributeSpec(AttributeKind.NUMERIC, AttributeScope.EVENT),
    })
    trace = build_trace("c", ["A", "B", "C"], [0, 1, 2], attrs={"amount": 5.0, "channel": "web"})
    log = make_log([trace], schema)
    stats = fit_stats(build_prefixes(log), log)
    layout = layout_from_stats(stats)
    assert layout.block("event_numeric:priority").width == 1
    graph = build_graph(build_prefixes(log)[0], stats)
    assert graph.edge_features[0][layout.block("event_numeric:priority").start] == 0.0
