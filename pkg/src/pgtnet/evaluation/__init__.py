"""
评估：DUMMY 基线、MAE、交叉验证与 earliness 分析
"""

from pgtnet.evaluation.baseline import DummyRegressor, dummy_predict
from pgtnet.evaluation.crossval import CrossValidationResult, RunResult, cross_validate, evaluate_baseline
from pgtnet.evaluation.earliness import earliness_cutoff, emit_earliness_table
from pgtnet.evaluation.metrics import Aggregate, EvaluationReport, PrefixBucket, aggregate, evaluate
from pgtnet.evaluation.report import read_report, summary_markdown, write_report

__all__ = [
    "DummyRegressor",
    "dummy_predict",
    "CrossValidationResult",
    "RunResult",
    "cross_validate",
    "evaluate_baseline",
    "earliness_cutoff",
    "emit_earliness_table",
    "Aggregate",
    "EvaluationReport",
    "PrefixBucket",
    "aggregate",
    "evaluate",
    "read_report",
    "summary_markdown",
    "write_report",
]
