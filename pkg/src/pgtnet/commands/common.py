"""
命令共用参数与加载逻辑
"""

import argparse
import logging
from pathlib import Path
from typing import Optional, Tuple

from pgtnet.config import PROFILES, default_seed, resolve_configs
from pgtnet.errors import ConfigError
from pgtnet.eventlog import load_event_log
from pgtnet.eventlog.model import AttributeSchema, EventLog
from pgtnet.eventlog.statistics import filter_short_traces
from pgtnet.model.config import PGTNetConfig
from pgtnet.prefixing import SplitMode, SplitPlan, make_split
from pgtnet.training.config import TrainConfig
from pgtnet.utils.utils import ensure_dir

logger = logging.getLogger(__name__)


def add_log_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--log", required=True, help="事件日志路径 (CSV 或 XES)")
    parser.add_argument("--schema", help="属性 schema JSON（含 CSV 列映射）")
    parser.add_argument("--format", choices=("csv", "xes"), help="日志格式，默认按扩展名推断")
    parser.add_argument("--min-events", type=int, default=3, help="过滤事件数少于该值的 trace")


def add_out_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", required=True, help="输出目录")


def add_split_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--split", choices=[m.value for m in SplitMode], default=SplitMode.CV.value)
    parser.add_argument("--folds", type=float, default=5,
                        help="cv 折数；holdout 模式下为训练比例（如 0.8）")
    parser.add_argument("--validation-fraction", type=float, default=0.2)
    parser.add_argument("--split-file", help="已有的 split.json，给定时忽略 --split/--folds")
    parser.add_argument("--seed", type=int, help="主随机种子（默认取 PGTNET_SEED 或 42）")


def add_model_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    parser.add_argument("--config", help="TOML/JSON 配置文件（[model] 与 [train] 两张表）")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--warmup-epochs", type=int)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--lr", type=float, dest="base_lr")
    parser.add_argument("--early-stop", type=int, dest="early_stop_patience")
    parser.add_argument("--hidden-dim", type=int)
    parser.add_argument("--layers", type=int, dest="num_layers")
    parser.add_argument("--heads", type=int, dest="num_heads")
    parser.add_argument("--d-pe", type=int)
    parser.add_argument("--d-se", type=int)
    parser.add_argument("--readout", choices=("mean", "sum"))
    parser.add_argument("--single-precision", action="store_true", help="float32 代替 float64")
    parser.add_argument("--rwse-undirected", action="store_true")
    parser.add_argument("--lap-sign-flip", action="store_true", help="训练时随机翻转 LapPE 符号")


def seed_of(args) -> int:
    return default_seed() if getattr(args, "seed", None) is None else int(args.seed)


def configs_from_args(args) -> Tuple[PGTNetConfig, TrainConfig]:
    model_overrides = {
        "hidden_dim": args.hidden_dim,
        "num_layers": args.num_layers,
        "num_heads": args.num_heads,
        "d_pe": args.d_pe,
        "d_se": args.d_se,
        "readout": args.readout,
        "precision": "single" if args.single_precision else None,
        "rwse_undirected": True if args.rwse_undirected else None,
    }
    train_overrides = {
        "epochs": args.epochs,
        "warmup_epochs": args.warmup_epochs,
        "batch_size": args.batch_size,
        "base_lr": args.base_lr,
        "early_stop_patience": args.early_stop_patience,
        "lap_sign_flip": True if args.lap_sign_flip else None,
    }
    return resolve_configs(args.profile, args.config, model_overrides, train_overrides, args.seed)


def load_schema(args) -> Optional[AttributeSchema]:
    return AttributeSchema.load(args.schema) if args.schema else None


def load_log(args) -> EventLog:
    """读取并过滤事件日志"""
    log = load_event_log(args.log, args.format, load_schema(args))
    return filter_short_traces(log, args.min_events)


def plan_from_args(args, log: EventLog) -> SplitPlan:
    if args.split_file:
        plan = SplitPlan.load(args.split_file)
        missing = set(log.case_ids) - set(plan.assignment)
        if missing:
            raise ConfigError(f"split file does not cover {len(missing)} case(s) of the log")
        return plan
    return make_split(log, SplitMode(args.split), args.folds, seed_of(args), args.validation_fraction)


def out_dir(args) -> Path:
    return ensure_dir(args.out)


def input_files(args) -> dict:
    return {
        "log": getattr(args, "log", None),
        "schema": getattr(args, "schema", None),
        "config": getattr(args, "config", None),
        "split_file": getattr(args, "split_file", None),
    }
