"""
数据相关命令
src/pgtnet/commands/data.py
提供合成日志、日志统计、图数据集转换与数据划分
"""
import logging
from dataclasses import asdict

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
from pgtnet.encodings import encode_dataset
from pgtnet.errors import ConfigError
from pgtnet.eventlog.export import canonical_schema, write_canonical_csv
from pgtnet.eventlog.statistics import log_statistics
from pgtnet.graphbuild import build_dataset, fit_stats, write_dataset, write_stats
from pgtnet.manifest import RunManifest
from pgtnet.prefixing import SplitPlan, build_prefixes, materialize_fold
from pgtnet.synthetic import SyntheticConfig, generate_synthetic_log
from pgtnet.utils.markdown_formatter import format_mapping_to_markdown_list

logger = logging.getLogger(__name__)

DATASET_FILE = "dataset.jsonl"
STATS_FILE = "stats.json"
SPLIT_FILE = "split.json"


def register_data_commands(subparsers):
    """
    注册数据相关命令

    Args:
        subparsers: argparse 子命令集合
    """

    # ==================== synth ====================
    synth = subparsers.add_parser("synth", help="生成两变体合成事件日志")
    add_out_argument(synth)
    synth.add_argument("--cases", type=int, default=30)
    synth.add_argument("--seed", type=int, default=7)
    synth.add_argument("--fast-step-hours", type=float, default=2.0)
    synth.add_argument("--slow-step-hours", type=float, default=24.0)
    synth.add_argument("--slow-fraction", type=float, default=0.5)
    synth.add_argument("--jitter", type=float, default=0.0)
    synth.add_argument("--short-traces", type=int, default=0)
    synth.set_defaults(handler=cmd_synth)

    # ==================== stats ====================
    stats = subparsers.add_parser("stats", help="事件日志统计")
    add_log_arguments(stats)
    stats.add_argument("--out", help="可选，写出 stats.md 的目录")
    stats.set_defaults(handler=cmd_stats)

    # ==================== convert ====================
    convert = subparsers.add_parser("convert", help="把事件日志转换为图数据集")
    add_log_arguments(convert)
    add_out_argument(convert)
    add_model_arguments(convert)
    convert.add_argument("--split-file", help="给定时只在该 fold 的训练 case 上拟合统计量")
    convert.add_argument("--fold", type=int, default=0)
    convert.add_argument("--seed", type=int)
    convert.set_defaults(handler=cmd_convert)

    # ==================== split ====================
    split = subparsers.add_parser("split", help="按 case 划分数据")
    add_log_arguments(split)
    add_out_argument(split)
    add_split_arguments(split)
    split.set_defaults(handler=cmd_split)


def cmd_synth(args) -> dict:
    config = SyntheticConfig(
        cases=args.cases,
        seed=args.seed,
        fast_step_hours=args.fast_step_hours,
        slow_step_hours=args.slow_step_hours,
        slow_fraction=args.slow_fraction,
        jitter=args.jitter,
        short_traces=args.short_traces,
    )
    target = out_dir(args)
    manifest = RunManifest.for_inputs("synth", asdict(config), {}, config.seed)

    log = generate_synthetic_log(config)
    csv_path = target / "synthetic.csv"
    schema_path = target / "schema.json"
    write_canonical_csv(log, csv_path)
    canonical_schema(log).save(schema_path)
    manifest.record_artifact(csv_path)
    manifest.record_artifact(schema_path)
    manifest.write(target)
    return {"log": str(csv_path), "schema": str(schema_path), "cases": len(log)}


def cmd_stats(args) -> dict:
    log = load_log(args)
    summary = log_statistics(log)
    if args.out:
        target = out_dir(args)
        path = target / "stats.md"
        path.write_text(format_mapping_to_markdown_list("## 事件日志统计", summary.to_dict()), encoding="utf-8")
        logger.info("写出日志统计 %s", path)
    return summary.to_dict()


def cmd_convert(args) -> dict:
    model_config, _ = configs_from_args(args)
    target = out_dir(args)
    manifest = RunManifest.for_inputs(
        "convert",
        {"model": model_config.to_dict(), "fold": args.fold, "min_events": args.min_events},
        input_files(args),
        model_config.seed,
    )

    log = load_log(args)
    records = build_prefixes(log)
    if args.split_file:
        plan = SplitPlan.load(args.split_file)
        if not 0 <= args.fold < plan.num_runs:
            raise ConfigError(f"--fold must be in [0, {plan.num_runs}), got {args.fold}")
        fit_records = materialize_fold(records, plan, args.fold).train
    else:
        fit_records = records
    stats = fit_stats(fit_records, log)

    graphs = build_dataset(records, stats, log)
    graphs = encode_dataset(graphs, model_config.d_pe, model_config.d_se, model_config.rwse_undirected)
    dataset_path = write_dataset(graphs, target / DATASET_FILE, manifest.hash)
    stats_path = write_stats(stats, target / STATS_FILE, manifest.hash)
    manifest.record_artifact(dataset_path)
    manifest.record_artifact(stats_path)
    manifest.write(target)
    return {"dataset": str(dataset_path), "stats": str(stats_path), "graphs": len(graphs)}


def cmd_split(args) -> dict:
    target = out_dir(args)
    seed = seed_of(args)
    manifest = RunManifest.for_inputs(
        "split",
        {"split": args.split, "folds": args.folds, "validation_fraction": args.validation_fraction,
         "min_events": args.min_events},
        input_files(args),
        seed,
    )
    log = load_log(args)
    plan = plan_from_args(args, log)
    path = target / SPLIT_FILE
    plan.save(path, manifest.hash)
    manifest.record_artifact(path)
    manifest.write(target)
    return {"split": str(path), "mode": plan.mode.value, "fold_sizes": plan.fold_sizes()}
