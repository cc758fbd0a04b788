import math

import numpy as np
import pandas as pd
import pytest

from pgtnet.errors import LengthMismatch, SchemaVersionMismatch
from pgtnet.evaluation import (
    DummyRegressor,
    EvaluationReport,
    PrefixBucket,
    aggregate,
    dummy_predict,
    earliness_cutoff,
    emit_earliness_table,
    evaluate,
    evaluate_baseline,
    read_report,
    summary_markdown,
    write_report,
)
from pgtnet.evaluation.crossval import DUMMY
from pgtnet.prefixing import EventPrefixRecord, SplitMode, build_prefixes, make_split

DAY = 86400.0


def _records(pairs):
    return [EventPrefixRecord(f"c{i}", k, (), seconds) for i, (k, seconds) in enumerate(pairs)]


# ==================== DUMMY ====================

def test_dummy_mean_per_k():
    assert dummy_predict(_records([(2, 100.0), (2, 300.0), (3, 50.0)]), 2) == 200.0


def test_dummy_falls_back_to_nearest_k():
    regressor = DummyRegressor().fit(_records([(2, 10.0), (4, 40.0), (9, 90.0)]))
    assert regressor.predict_one(5) == 40.0
    assert regressor.predict_one(20) == 90.0
    # 3 is equally far from 2 and 4
    assert regressor.predict_one(3) == 10.0


def test_dummy_needs_training_data():
    with pytest.raises(ValueError):
        DummyRegressor().fit([])


# ==================== MAE ====================

def test_perfect_predictions():
    records = _records([(2, DAY), (3, 2 * DAY), (3, 0.0)])
    report = evaluate([r.remaining_seconds for r in records], records, 4.0)
    assert report.mae_days == 0.0
    assert report.relative_mae == 0.0


def test_constant_one_day_error():
    records = _records([(2, DAY), (3, 2 * DAY), (3, 5 * DAY), (4, 3 * DAY)])
    predictions = [r.remaining_seconds + (DAY if i % 2 else -DAY) for i, r in enumerate(records)]
    report = evaluate(predictions, records, 4.0)
    assert report.mae_days == pytest.approx(1.0)
    assert report.relative_mae == pytest.approx(0.25)
    assert report.relative_mae_percent == pytest.approx(25.0)
    assert {k: b.count for k, b in report.per_prefix_length.items()} == {2: 1, 3: 2, 4: 1}
    assert sum(b.count for b in report.per_prefix_length.values()) == report.num_records


def test_per_k_mae_weights_back_to_overall_mae():
    rng = np.random.default_rng(8)
    pairs = [(int(k), float(s)) for k, s in zip(rng.integers(2, 7, size=40), rng.uniform(0, 9 * DAY, size=40))]
    records = _records(pairs)
    predictions = [r.remaining_seconds + rng.normal(0, 2 * DAY) for r in records]
    report = evaluate(predictions, records, 4.0)
    assert len(report.per_prefix_length) > 1
    weighted = sum(b.count * b.mae_days for b in report.per_prefix_length.values())
    assert weighted / report.num_records == pytest.approx(report.mae_days, rel=1e-12)


def test_relative_mae_without_average_is_nan():
    records = _records([(2, DAY)])
    assert math.isnan(evaluate([0.0], records).relative_mae)


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        evaluate([1.0, 2.0], _records([(2, 1.0)]))
    with pytest.raises(LengthMismatch):
        evaluate([], [])


def test_aggregate_sample_std():
    result = aggregate([2.0, 4.0])
    assert result.mean == 3.0
    assert result.std == pytest.approx(math.sqrt(2))
    assert result.runs == 2
    assert aggregate([1.5]).std == 0.0
    with pytest.raises(ValueError):
        aggregate([])


# ==================== earliness ====================

def test_earliness_cutoff():
    buckets = {2: PrefixBucket(50, 1.0), 3: PrefixBucket(30, 1.0), 4: PrefixBucket(15, 1.0), 5: PrefixBucket(5, 1.0)}
    assert earliness_cutoff(buckets) == 4
    assert earliness_cutoff(buckets, coverage=0.5) == 2
    assert earliness_cutoff(buckets, coverage=1.0) == 5


def test_earliness_single_prefix_length(tmp_path):
    report = EvaluationReport(0.5, 0.1, {2: PrefixBucket(7, 0.5)}, 7)
    frame = pd.read_csv(emit_earliness_table(report, tmp_path / "earliness.csv"))
    assert list(frame.columns) == ["k", "count", "mae_days", "cutoff"]
    assert frame.to_dict("records") == [{"k": 2, "count": 7, "mae_days": 0.5, "cutoff": 1}]


def test_earliness_skips_empty_buckets(tmp_path):
    report = EvaluationReport(1.0, 0.1, {2: PrefixBucket(4, 1.0), 3: PrefixBucket(0, 0.0), 4: PrefixBucket(1, 2.0)}, 5)
    frame = pd.read_csv(emit_earliness_table(report, tmp_path / "earliness.csv"))
    assert frame["k"].tolist() == [2, 4]
    assert frame["cutoff"].tolist() == [0, 1]


# ==================== 交叉验证与报告 ====================

def test_baseline_over_folds(synthetic_log):
    plan = make_split(synthetic_log, SplitMode.CV, 3, seed=2)
    result = evaluate_baseline(synthetic_log, plan)
    assert set(result.reports) == {DUMMY}
    assert result.aggregates[DUMMY].runs == 3
    pooled = result.reports[DUMMY]
    assert pooled.num_records == len(build_prefixes(synthetic_log))
    assert len(pooled.per_fold) == 3
    assert np.mean([r.mae_days for r in pooled.per_fold]) == pytest.approx(result.aggregates[DUMMY].mean)
    assert pooled.mae_days > 0


def test_report_round_trip(tmp_path, synthetic_log):
    plan = make_split(synthetic_log, SplitMode.CV, 3, seed=2)
    result = evaluate_baseline(synthetic_log, plan)
    path = write_report(result, tmp_path / "report.json", manifest_hash="abc", split_mode="cv")
    loaded = read_report(path)
    assert loaded.reports == result.reports
    assert loaded.aggregates == result.aggregates

    summary = summary_markdown(loaded)
    assert "## dummy" in summary
    assert "✅" in summary


def test_report_version_checked(tmp_path):
    path = tmp_path / "report.json"
    path.write_text('{"schema_version": "pgtnet-report/0"}', encoding="utf-8")
    with pytest.raises(SchemaVersionMismatch):
        read_report(path)
