"""
交叉验证实验

Runs every (fold, seed) combination of a split plan, evaluates PGTNet and the
DUMMY baseline on each test fold, and aggregates MAE as mean ± sample std.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from pgtnet.encodings import encode_dataset
from pgtnet.eventlog.model import EventLog
from pgtnet.evaluation.baseline import DummyRegressor
from pgtnet.evaluation.metrics import Aggregate, EvaluationReport, aggregate, average_reports, evaluate
from pgtnet.graphbuild.builder import build_dataset
from pgtnet.graphbuild.stats import fit_stats
from pgtnet.model.config import PGTNetConfig
from pgtnet.prefixing import EventPrefixRecord, SplitPlan, build_prefixes, materialize_fold
from pgtnet.training.config import TrainConfig
from pgtnet.training.trainer import TrainedModel, denormalize, predict_normalized, train_model
from pgtnet.utils.utils import seconds_to_days

logger = logging.getLogger(__name__)

PGTNET = "pgtnet"
DUMMY = "dummy"


@dataclass(frozen=True)
class RunResult:
    approach: str
    fold: int
    seed: int
    report: EvaluationReport


@dataclass
class CrossValidationResult:
    """
    reports: per approach, the pooled test report (all folds, averaged over seeds)
    aggregates: per approach, mean ± std of the per-run MAE in days
    """
    reports: Dict[str, EvaluationReport]
    aggregates: Dict[str, Aggregate]
    runs: List[RunResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "reports": {name: r.to_dict() for name, r in sorted(self.reports.items())},
            "aggregates": {name: a.to_dict() for name, a in sorted(self.aggregates.items())},
            "runs": [
                {"approach": r.approach, "fold": r.fold, "seed": r.seed, "mae_days": r.report.mae_days}
                for r in self.runs
            ],
        }


def _pool(runs: Sequence[RunResult], predictions: Dict[tuple, np.ndarray],
          tests: Dict[int, List[EventPrefixRecord]], seeds: Sequence[int], avg_days: float) -> EvaluationReport:
    """One report per seed over the union of test folds, then averaged over seeds."""
    per_seed = []
    for seed in seeds:
        folds = sorted(tests)
        pooled_records = [r for f in folds for r in tests[f]]
        pooled_pred = np.concatenate([predictions[(f, seed)] for f in folds])
        per_seed.append(evaluate(pooled_pred, pooled_records, avg_days))
    report = average_reports(per_seed)
    report.per_fold = [r.report for r in runs]
    return report


def evaluate_baseline(log: EventLog, plan: SplitPlan) -> CrossValidationResult:
    """Run only the DUMMY baseline over every fold of ``plan``."""
    return cross_validate(log, plan, seeds=(), include_pgtnet=False)


def cross_validate(
        log: EventLog,
        plan: SplitPlan,
        model_config: Optional[PGTNetConfig] = None,
        train_config: Optional[TrainConfig] = None,
        seeds: Sequence[int] = (42,),
        include_pgtnet: bool = True,
        on_trained: Optional[Callable[[int, int, TrainedModel], None]] = None,
) -> CrossValidationResult:
    """
    交叉验证

    Args:
        log: 已过滤（每条 trace ≥ 3 个事件）的事件日志
        plan: 数据划分
        model_config: 模型配置
        train_config: 训练配置（seed 会被逐个替换）
        seeds: 随机种子列表
        include_pgtnet: False 时只评估 DUMMY
        on_trained: 每个 (fold, seed) 训练完成后的回调

    Returns:
        CrossValidationResult
    """
    if include_pgtnet and (model_config is None or train_config is None or not seeds):
        raise ValueError("PGTNet evaluation needs model_config, train_config and at least one seed")
    records = build_prefixes(log)
    avg_days = seconds_to_days(log.average_case_duration_seconds)

    runs: List[RunResult] = []
    tests: Dict[int, List[EventPrefixRecord]] = {}
    dummy_predictions: Dict[tuple, np.ndarray] = {}
    pgt_predictions: Dict[tuple, np.ndarray] = {}

    for fold in range(plan.num_runs):
        data = materialize_fold(records, plan, fold)
        tests[fold] = data.test

        dummy = DummyRegressor().fit(data.train)
        dummy_pred = dummy.predict(data.test)
        dummy_predictions[(fold, 0)] = dummy_pred
        runs.append(RunResult(DUMMY, fold, 0, evaluate(dummy_pred, data.test, avg_days)))
        logger.info("fold %d DUMMY MAE %.4f 天", fold, runs[-1].report.mae_days)

        if not include_pgtnet:
            continue
        stats = fit_stats(data.train, log)
        enc_args = (model_config.d_pe, model_config.d_se, model_config.rwse_undirected)
        train_graphs = encode_dataset(build_dataset(data.train, stats, log), *enc_args)
        val_graphs = encode_dataset(build_dataset(data.validation, stats, log), *enc_args)
        test_graphs = encode_dataset(build_dataset(data.test, stats, log), *enc_args)

        for seed in seeds:
            logger.info("🚀 fold %d / seed %d", fold, seed)
            trained = train_model(
                train_graphs, val_graphs,
                replace(model_config, seed=seed), replace(train_config, seed=seed),
                stats,
            )
            normalized = predict_normalized(trained.model, test_graphs)
            pred = np.array([denormalize(v, stats) for v in normalized])
            pgt_predictions[(fold, seed)] = pred
            runs.append(RunResult(PGTNET, fold, seed, evaluate(pred, data.test, avg_days)))
            logger.info("fold %d seed %d PGTNet MAE %.4f 天", fold, seed, runs[-1].report.mae_days)
            if on_trained is not None:
                on_trained(fold, seed, trained)

    dummy_runs = [r for r in runs if r.approach == DUMMY]
    reports = {DUMMY: _pool(dummy_runs, dummy_predictions, tests, (0,), avg_days)}
    aggregates = {DUMMY: aggregate([r.report.mae_days for r in dummy_runs])}
    if include_pgtnet:
        pgt_runs = [r for r in runs if r.approach == PGTNET]
        reports[PGTNET] = _pool(pgt_runs, pgt_predictions, tests, seeds, avg_days)
        aggregates[PGTNET] = aggregate([r.report.mae_days for r in pgt_runs])

    for name, agg in sorted(aggregates.items()):
        logger.info("✅ %s: MAE %.4f ± %.4f 天 (%d 次运行)", name, agg.mean, agg.std, agg.runs)
    return CrossValidationResult(reports, aggregates, runs)
