"""
评估相关命令
src/pgtnet/commands/evaluation.py
交叉验证 / holdout 评估、DUMMY 基线与报告渲染
"""
import logging

from pgtnet.commands.common import (
    add_log_arguments,
    add_model_arguments,
    add_out_argument,
    add_split_arguments,
    configs_from_args,
    input_files,
    load_log,
    out_dir,
    plan_from_args,
    seed_of,
)
from pgtnet.evaluation import (
    CrossValidationResult,
    cross_validate,
    emit_earliness_table,
    evaluate_baseline,
    read_report,
    summary_markdown,
    write_report,
)
from pgtnet.evaluation.crossval import DUMMY, PGTNET
from pgtnet.evaluation.earliness import DEFAULT_COVERAGE
from pgtnet.errors import ConfigError
from pgtnet.manifest import RunManifest

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
EARLINESS_FILE = "earliness.csv"
SUMMARY_FILE = "summary.md"


def _seed_list(raw: str):
    return [int(s) for s in raw.split(",") if s.strip()]


def register_evaluation_commands(subparsers):
    """
    注册评估相关命令

    Args:
        subparsers: argparse 子命令集合
    """

    # ==================== evaluate ====================
    evaluate = subparsers.add_parser("evaluate", help="PGTNet 与 DUMMY 的交叉验证 / holdout 评估")
    add_log_arguments(evaluate)
    add_out_argument(evaluate)
    add_split_arguments(evaluate)
    add_model_arguments(evaluate)
    evaluate.add_argument("--seeds", type=_seed_list, help="逗号分隔的训练种子，默认只用 --seed")
    evaluate.add_argument("--coverage", type=float, default=DEFAULT_COVERAGE, help="earliness 截止覆盖率")
    evaluate.set_defaults(handler=cmd_evaluate)

    # ==================== baseline ====================
    baseline = subparsers.add_parser("baseline", help="只评估 DUMMY 基线")
    add_log_arguments(baseline)
    add_out_argument(baseline)
    add_split_arguments(baseline)
    baseline.add_argument("--coverage", type=float, default=DEFAULT_COVERAGE)
    baseline.set_defaults(handler=cmd_baseline)

    # ==================== report ====================
    report = subparsers.add_parser("report", help="从 report.json 渲染 earliness 表与 Markdown 汇总")
    report.add_argument("--report", required=True, help="report.json 路径")
    add_out_argument(report)
    report.add_argument("--approach", choices=(PGTNET, DUMMY), help="earliness 表使用的方法，默认优先 pgtnet")
    report.add_argument("--coverage", type=float, default=DEFAULT_COVERAGE)
    report.set_defaults(handler=cmd_report)


def _write_outputs(result: CrossValidationResult, target, coverage: float, approach=None) -> dict:
    """写出 earliness.csv 与 summary.md，返回产物路径"""
    name = approach or (PGTNET if PGTNET in result.reports else DUMMY)
    if name not in result.reports:
        raise ConfigError(f"report holds no results for {name!r}")
    earliness_path = emit_earliness_table(result.reports[name], target / EARLINESS_FILE, coverage)
    summary_path = target / SUMMARY_FILE
    summary_path.write_text(summary_markdown(result), encoding="utf-8")
    return {"earliness": earliness_path, "summary": summary_path}


def _mae_summary(result: CrossValidationResult) -> dict:
    return {
        name: {"mae_days": agg.mean, "std": agg.std, "runs": agg.runs,
               "relative_mae": result.reports[name].relative_mae}
        for name, agg in sorted(result.aggregates.items())
    }


def cmd_evaluate(args) -> dict:
    model_config, train_config = configs_from_args(args)
    seeds = args.seeds or [train_config.seed]
    target = out_dir(args)
    manifest = RunManifest.for_inputs(
        "evaluate",
        {"model": model_config.to_dict(), "train": train_config.to_dict(), "seeds": seeds,
         "split": args.split, "folds": args.folds, "validation_fraction": args.validation_fraction,
         "min_events": args.min_events, "coverage": args.coverage},
        input_files(args),
        seed_of(args),
    )

    log = load_log(args)
    plan = plan_from_args(args, log)
    logger.info("🚀 评估 %d 个 run × %d 个种子", plan.num_runs, len(seeds))
    result = cross_validate(log, plan, model_config, train_config, seeds=seeds)

    report_path = write_report(result, target / REPORT_FILE, manifest.hash, plan.mode.value)
    outputs = _write_outputs(result, target, args.coverage)
    for path in (report_path, *outputs.values()):
        manifest.record_artifact(path)
    manifest.write(target)
    return {"report": str(report_path), "results": _mae_summary(result)}


def cmd_baseline(args) -> dict:
    target = out_dir(args)
    manifest = RunManifest.for_inputs(
        "baseline",
        {"split": args.split, "folds": args.folds, "validation_fraction": args.validation_fraction,
         "min_events": args.min_events, "coverage": args.coverage},
        input_files(args),
        seed_of(args),
    )

    log = load_log(args)
    plan = plan_from_args(args, log)
    result = evaluate_baseline(log, plan)

    report_path = write_report(result, target / REPORT_FILE, manifest.hash, plan.mode.value)
    earliness_path = emit_earliness_table(result.reports[DUMMY], target / EARLINESS_FILE, args.coverage)
    for path in (report_path, earliness_path):
        manifest.record_artifact(path)
    manifest.write(target)
    return {"report": str(report_path), "results": _mae_summary(result)}


def cmd_report(args) -> dict:
    target = out_dir(args)
    manifest = RunManifest.for_inputs(
        "report", {"approach": args.approach, "coverage": args.coverage}, {"report": args.report}, 0,
    )
    result = read_report(args.report)
    outputs = _write_outputs(result, target, args.coverage, args.approach)
    for path in outputs.values():
        manifest.record_artifact(path)
    manifest.write(target)
    return {name: str(path) for name, path in outputs.items()} | {"results": _mae_summary(result)}
