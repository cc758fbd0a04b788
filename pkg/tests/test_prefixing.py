import pytest

from pgtnet.errors import ConfigError, TooFewCases, TraceTooShort
from pgtnet.prefixing import SplitMode, SplitPlan, build_prefixes, make_split, materialize_fold
from pgtnet.synthetic import SyntheticConfig, generate_synthetic_log


def test_trace_of_three_gives_one_prefix(make_trace, make_log):
    records = build_prefixes(make_log([make_trace("a", ["A", "B", "C"], [0, 1, 5])]))
    assert len(records) == 1
    assert records[0].k == 2
    assert records[0].remaining_seconds == 4 * 3600


def test_last_prefix_target(make_trace, make_log):
    hours = [0, 1, 3, 6, 10, 15]
    records = build_prefixes(make_log([make_trace("a", list("ABCDEF"), hours)]))
    assert [r.k for r in records] == [2, 3, 4, 5]
    assert records[-1].remaining_seconds == (15 - 10) * 3600
    assert all(r.events == records[-1].events[:r.k] for r in records)


def test_prefix_count_matches_naive(synthetic_log):
    records = build_prefixes(synthetic_log)
    assert len(records) == sum(len(t) - 2 for t in synthetic_log)
    assert all(r.remaining_seconds >= 0 for r in records)


def test_short_trace_rejected(make_trace, make_log):
    with pytest.raises(TraceTooShort):
        build_prefixes(make_log([make_trace("a", ["A", "B"], [0, 1])]))


def test_cv_fold_sizes(synthetic_log):
    log = synthetic_log.subset(synthetic_log.case_ids[:10])
    plan = make_split(log, SplitMode.CV, 5, seed=1)
    assert plan.fold_sizes() == [2, 2, 2, 2, 2]
    assert set(plan.assignment) == set(log.case_ids)


def test_cv_deterministic(synthetic_log):
    assert make_split(synthetic_log, SplitMode.CV, 5, 9).assignment == \
           make_split(synthetic_log, SplitMode.CV, 5, 9).assignment


def test_cv_fold_sizes_differ_by_at_most_one(synthetic_log):
    sizes = make_split(synthetic_log, SplitMode.CV, 4, 3).fold_sizes()
    assert max(sizes) - min(sizes) <= 1


def test_holdout_takes_latest_cases():
    log = generate_synthetic_log(SyntheticConfig(cases=100, seed=5))
    plan = make_split(log, SplitMode.HOLDOUT, 0.8, seed=0)
    _, _, test = plan.partition(0)
    latest = sorted(log.case_ids, key=lambda c: log.trace(c).start)[-20:]
    assert set(test) == set(latest)


def test_holdout_validation_is_latest_of_training_pool():
    log = generate_synthetic_log(SyntheticConfig(cases=50, seed=2))
    plan = make_split(log, SplitMode.HOLDOUT, 0.8, seed=0, validation_fraction=0.25)
    train, validation, _ = plan.partition(0)
    assert len(validation) == 10
    assert max(log.trace(c).start for c in train) <= min(log.trace(c).start for c in validation)


def test_materialize_fold_routes_cases(synthetic_log):
    records = build_prefixes(synthetic_log)
    plan = make_split(synthetic_log, SplitMode.CV, 3, 4)
    data = materialize_fold(records, plan, 1)
    train_ids = {r.case_id for r in data.train}
    val_ids = {r.case_id for r in data.validation}
    test_ids = {r.case_id for r in data.test}
    assert not (train_ids & val_ids or train_ids & test_ids or val_ids & test_ids)
    assert len(data.train) + len(data.validation) + len(data.test) == len(records)
    assert test_ids == {c for c, f in plan.assignment.items() if f == 1}


def test_materialize_three_known_cases(make_trace, make_log):
    log = make_log([make_trace(c, ["A", "B", "C"], [0, 1, 2]) for c in ("x", "y", "z")])
    plan = SplitPlan(SplitMode.CV, 2, 0, {"x": 0, "y": 1, "z": 1}, 0.5, ("x", "y", "z"))
    data = materialize_fold(build_prefixes(log), plan, 0)
    assert [r.case_id for r in data.test] == ["x"]
    assert sorted(r.case_id for r in data.train + data.validation) == ["y", "z"]


def test_too_few_cases(make_trace, make_log):
    log = make_log([make_trace(c, ["A", "B", "C"], [0, 1, 2]) for c in ("x", "y")])
    with pytest.raises(TooFewCases):
        make_split(log, SplitMode.CV, 2, 0)


def test_invalid_split_arguments(synthetic_log):
    with pytest.raises(ConfigError):
        make_split(synthetic_log, SplitMode.CV, 1, 0)
    with pytest.raises(ConfigError):
        make_split(synthetic_log, SplitMode.HOLDOUT, 5, 0)


def test_split_file_round_trip(tmp_path, synthetic_log):
    plan = make_split(synthetic_log, SplitMode.CV, 5, 3)
    path = tmp_path / "split.json"
    plan.save(path, manifest_hash="abc")
    assert SplitPlan.load(path) == plan
