"""
训练相关命令
src/pgtnet/commands/training.py
在一个 fold 上训练 PGTNet，写出 metrics.csv、checkpoint.bin 与 stats.json
"""
import logging
from dataclasses import replace

import numpy as np

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
)
from pgtnet.encodings import encode_dataset
from pgtnet.errors import ConfigError, Diverged
from pgtnet.evaluation import DummyRegressor, evaluate
from pgtnet.graphbuild import build_dataset, fit_stats, write_stats
from pgtnet.manifest import RunManifest
from pgtnet.prefixing import build_prefixes, materialize_fold
from pgtnet.training import denormalize, save_trained, train_model, write_metrics_csv
from pgtnet.training.trainer import predict_normalized
from pgtnet.utils.utils import seconds_to_days

logger = logging.getLogger(__name__)

METRICS_FILE = "metrics.csv"
CHECKPOINT_FILE = "checkpoint.bin"
STATS_FILE = "stats.json"


def register_training_commands(subparsers):
    """
    注册训练相关命令

    Args:
        subparsers: argparse 子命令集合
    """
    train = subparsers.add_parser("train", help="在一个 fold 上训练 PGTNet")
    add_log_arguments(train)
    add_out_argument(train)
    add_split_arguments(train)
    add_model_arguments(train)
    train.add_argument("--fold", type=int, default=0, help="作为测试集的 fold（holdout 模式只有 0）")
    train.add_argument("--checkpoint-every", type=int, help="每 N 个 epoch 刷新 metrics.csv 与 checkpoint.bin")
    train.set_defaults(handler=cmd_train)


def cmd_train(args) -> dict:
    model_config, train_config = configs_from_args(args)
    if args.checkpoint_every is not None:
        train_config = replace(train_config, checkpoint_every=args.checkpoint_every)
    target = out_dir(args)
    manifest = RunManifest.for_inputs(
        "train",
        {"model": model_config.to_dict(), "train": train_config.to_dict(), "split": args.split,
         "folds": args.folds, "validation_fraction": args.validation_fraction, "fold": args.fold,
         "min_events": args.min_events},
        input_files(args),
        train_config.seed,
    )

    log = load_log(args)
    plan = plan_from_args(args, log)
    if not 0 <= args.fold < plan.num_runs:
        raise ConfigError(f"--fold must be in [0, {plan.num_runs}), got {args.fold}")
    data = materialize_fold(build_prefixes(log), plan, args.fold)
    stats = fit_stats(data.train, log)
    enc_args = (model_config.d_pe, model_config.d_se, model_config.rwse_undirected)
    train_graphs = encode_dataset(build_dataset(data.train, stats, log), *enc_args)
    val_graphs = encode_dataset(build_dataset(data.validation, stats, log), *enc_args)
    test_graphs = encode_dataset(build_dataset(data.test, stats, log), *enc_args)

    metrics_path = target / METRICS_FILE
    checkpoint_path = target / CHECKPOINT_FILE
    try:
        trained = train_model(
            train_graphs, val_graphs, model_config, train_config, stats,
            metrics_path=metrics_path, checkpoint_path=checkpoint_path,
        )
    except Diverged as e:
        if e.last_good is not None:
            save_trained(e.last_good, checkpoint_path, manifest.hash)
            logger.warning("⚠️ 训练发散，已保存最近的最优模型 %s", checkpoint_path)
        raise
    # 最终产物带上 manifest hash
    write_metrics_csv(trained.curve, metrics_path)
    save_trained(trained, checkpoint_path, manifest.hash)
    stats_path = write_stats(stats, target / STATS_FILE, manifest.hash)

    avg_days = seconds_to_days(log.average_case_duration_seconds)
    pred = np.array([denormalize(v, stats) for v in predict_normalized(trained.model, test_graphs)])
    test_report = evaluate(pred, data.test, avg_days)
    dummy_report = evaluate(DummyRegressor().fit(data.train).predict(data.test), data.test, avg_days)
    logger.info("fold %d 测试 MAE %.4f 天 (DUMMY %.4f 天)", args.fold, test_report.mae_days, dummy_report.mae_days)

    for path in (metrics_path, checkpoint_path, stats_path):
        manifest.record_artifact(path)
    manifest.write(target)
    return {
        "fold": args.fold,
        "best_epoch": trained.best_epoch,
        "best_val_loss": trained.best_val_loss,
        "test_mae_days": test_report.mae_days,
        "dummy_mae_days": dummy_report.mae_days,
        "checkpoint": str(checkpoint_path),
    }
