"""
训练循环与预测

Every random stream of a run derives from one master seed: the epoch shuffle
uses derive_seed(seed, 10, epoch), the dropout masks of step s in epoch e use
derive_seed(seed, 11, e, s) and LapPE sign flips derive_seed(seed, 12, e, s).
"""

import copy
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence, Union

import numpy as np
import pandas as pd
import torch

from pgtnet.encodings import encode_dataset
from pgtnet.errors import Diverged, NonFiniteGradient, NonFiniteOutput, PrefixTooShort, SchemaVersionMismatch
from pgtnet.eventlog.model import Event
from pgtnet.graphbuild.builder import PrefixGraph, build_graph
from pgtnet.graphbuild.layout import layout_from_stats
from pgtnet.graphbuild.stats import NormalizationStats
from pgtnet.model.batching import collate
from pgtnet.model.checkpoint import load_checkpoint, save_checkpoint
from pgtnet.model.config import PGTNetConfig
from pgtnet.model.network import PGTNet, backward
from pgtnet.prefixing import MIN_PREFIX_LENGTH, EventPrefixRecord
from pgtnet.training.config import TrainConfig
from pgtnet.training.optimizer import AdamW
from pgtnet.training.schedule import lr_schedule
from pgtnet.utils.utils import derive_seed, seconds_to_days

logger = logging.getLogger(__name__)

METRICS_COLUMNS = ("epoch", "train_loss", "val_loss", "lr")
PREDICT_BATCH_SIZE = 256


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    lr: float


@dataclass
class TrainedModel:
    """Best-validation checkpoint plus everything needed to predict with it."""
    model: PGTNet
    stats: NormalizationStats
    model_config: PGTNetConfig
    train_config: TrainConfig
    curve: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = math.inf

    @property
    def edge_dim(self) -> int:
        return self.model.edge_dim


class RemainingTime(NamedTuple):
    seconds: float
    days: float


def _flip_lap_signs(batch, generator: torch.Generator) -> None:
    """Random ±1 per (graph, eigenvector) column, applied to every node of the graph."""
    signs = torch.randint(0, 2, (batch.num_graphs, batch.lap_pe.size(-1)), generator=generator)
    signs = (signs * 2 - 1).to(batch.lap_pe.dtype)
    batch.lap_pe = batch.lap_pe * signs[batch.batch]


def evaluate_loss(model: PGTNet, graphs: Sequence[PrefixGraph], batch_size: int = PREDICT_BATCH_SIZE) -> float:
    """Mean L1 over ``graphs`` in eval mode (per-graph mean, not per-batch)."""
    if not graphs:
        return math.nan
    predictions = predict_normalized(model, graphs, batch_size)
    targets = np.array([g.target_normalized for g in graphs])
    return float(np.mean(np.abs(predictions - targets)))


@torch.no_grad()
def predict_normalized(model: PGTNet, graphs: Sequence[PrefixGraph], batch_size: int = PREDICT_BATCH_SIZE) -> np.ndarray:
    was_training = model.training
    model.eval()
    dtype = model.config.dtype
    out = []
    try:
        for start in range(0, len(graphs), batch_size):
            batch = collate(graphs[start:start + batch_size], model.edge_dim, dtype)
            out.append(model(batch).detach().cpu().numpy().astype(np.float64))
    finally:
        model.train(was_training)
    return np.concatenate(out) if out else np.zeros(0)


def train_model(
        train_graphs: Sequence[PrefixGraph],
        val_graphs: Sequence[PrefixGraph],
        model_config: PGTNetConfig,
        train_config: TrainConfig,
        stats: NormalizationStats,
        metrics_path=None,
        checkpoint_path=None,
) -> TrainedModel:
    """
    训练 PGTNet

    Args:
        train_graphs: 训练集图（缺少编码时自动计算）
        val_graphs: 验证集图；为空时按训练损失选择检查点
        model_config: 模型配置
        train_config: 训练配置
        stats: 训练集统计量（决定词表大小与边特征维度）
        metrics_path: 可选，写出 metrics CSV
        checkpoint_path: 可选，每 checkpoint_every 个 epoch 及结束时保存最优模型

    Returns:
        验证损失最优的 TrainedModel

    Raises:
        Diverged: 损失或梯度出现 NaN/inf，异常中携带最近的最优模型
    """
    if not train_graphs:
        raise ValueError("train_model needs at least one training graph")
    enc_args = (model_config.d_pe, model_config.d_se, model_config.rwse_undirected)
    train_graphs = encode_dataset(train_graphs, *enc_args)
    val_graphs = encode_dataset(val_graphs, *enc_args)

    edge_dim = layout_from_stats(stats).width
    model = PGTNet(model_config, stats.vocab_size, edge_dim)
    optimizer = AdamW(model.parameters(), lr=train_config.base_lr, weight_decay=train_config.weight_decay)
    result = TrainedModel(copy.deepcopy(model), stats, model_config, train_config)
    dtype = model_config.dtype
    seed = train_config.seed
    patience_left = train_config.early_stop_patience

    logger.info(
        "🚀 开始训练: %d 训练图, %d 验证图, %d epochs, batch %d, 参数量 %d",
        len(train_graphs), len(val_graphs), train_config.epochs, train_config.batch_size,
        sum(p.numel() for p in model.parameters()),
    )

    with torch.random.fork_rng(devices=[]):
        for epoch in range(train_config.epochs):
            lr = lr_schedule(epoch, train_config)
            optimizer.set_lr(lr)
            model.train()
            order = np.random.default_rng(derive_seed(seed, 10, epoch)).permutation(len(train_graphs))

            loss_sum = 0.0
            for step, start in enumerate(range(0, len(order), train_config.batch_size)):
                batch = collate([train_graphs[i] for i in order[start:start + train_config.batch_size]],
                                edge_dim, dtype)
                if train_config.lap_sign_flip:
                    _flip_lap_signs(batch, torch.Generator().manual_seed(derive_seed(seed, 12, epoch, step)))
                torch.manual_seed(derive_seed(seed, 11, epoch, step))
                try:
                    loss, _ = backward(model, batch)
                    if not math.isfinite(loss):
                        raise NonFiniteOutput(f"loss is {loss}")
                    optimizer.step()
                except (NonFiniteOutput, NonFiniteGradient) as e:
                    logger.error("💥 训练发散 (epoch %d, step %d): %s", epoch, step, e)
                    raise Diverged(f"training diverged at epoch {epoch}, step {step}: {e}", result) from e
                loss_sum += loss * batch.num_graphs
            train_loss = loss_sum / len(train_graphs)

            try:
                val_loss = evaluate_loss(model, val_graphs)
            except NonFiniteOutput as e:
                logger.error("💥 验证发散 (epoch %d): %s", epoch, e)
                raise Diverged(f"validation diverged at epoch {epoch}: {e}", result) from e
            record = EpochRecord(epoch, train_loss, val_loss, lr)
            result.curve.append(record)
            logger.info("epoch %d: train %.6f, val %.6f, lr %.3g", epoch, train_loss, val_loss, lr)

            selection = val_loss if val_graphs else train_loss
            if selection < result.best_val_loss:
                result.model = copy.deepcopy(model)
                result.best_val_loss = selection
                result.best_epoch = epoch
                patience_left = train_config.early_stop_patience
            elif patience_left is not None:
                patience_left -= 1
                if patience_left <= 0:
                    logger.info("⚠️ 提前停止: %d 个 epoch 无改进", train_config.early_stop_patience)
                    break

            every = train_config.checkpoint_every
            if every is not None and (epoch + 1) % every == 0:
                if metrics_path is not None:
                    write_metrics_csv(result.curve, metrics_path)
                if checkpoint_path is not None:
                    save_trained(result, checkpoint_path)

    if metrics_path is not None:
        write_metrics_csv(result.curve, metrics_path)
    if checkpoint_path is not None:
        save_trained(result, checkpoint_path)
    result.model.eval()
    logger.info("✅ 训练完成: 最优 epoch %d, 验证损失 %.6f", result.best_epoch, result.best_val_loss)
    return result


def write_metrics_csv(curve: Sequence[EpochRecord], path) -> Path:
    path = Path(path)
    frame = pd.DataFrame([[r.epoch, r.train_loss, r.val_loss, r.lr] for r in curve], columns=list(METRICS_COLUMNS))
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.17g", na_rep="nan")
    return path


def save_trained(trained: TrainedModel, path, manifest_hash: Optional[str] = None) -> Path:
    extra = {
        "stats": trained.stats.to_dict(),
        "train_config": trained.train_config.to_dict(),
        "curve": [[r.epoch, r.train_loss, r.val_loss, r.lr] for r in trained.curve],
        "best_epoch": trained.best_epoch,
        "best_val_loss": trained.best_val_loss,
    }
    if manifest_hash:
        extra["manifest_hash"] = manifest_hash
    return save_checkpoint(trained.model, path, extra)


def load_trained(path) -> TrainedModel:
    model, extra = load_checkpoint(path)
    if "stats" not in extra:
        raise SchemaVersionMismatch(f"{path}: checkpoint carries no normalization statistics")
    return TrainedModel(
        model=model,
        stats=NormalizationStats.from_dict(extra["stats"]),
        model_config=model.config,
        train_config=TrainConfig.from_dict(extra["train_config"]),
        curve=[EpochRecord(int(e), float(t), float(v), float(lr)) for e, t, v, lr in extra["curve"]],
        best_epoch=int(extra["best_epoch"]),
        best_val_loss=float(extra["best_val_loss"]),
    )


# ==================== 预测 ====================

def denormalize(normalized: float, stats: NormalizationStats) -> float:
    """Normalized output → seconds, clamped at 0."""
    return max(0.0, float(normalized) * stats.max_case_duration_seconds)


def _as_record(prefix: Union[EventPrefixRecord, Sequence[Event]]) -> EventPrefixRecord:
    if isinstance(prefix, EventPrefixRecord):
        return prefix
    events = tuple(prefix)
    if len(events) < MIN_PREFIX_LENGTH:
        raise PrefixTooShort(f"prefix has {len(events)} event(s); at least {MIN_PREFIX_LENGTH} are required")
    return EventPrefixRecord(events[0].case_id, len(events), events, 0.0)


def predict_batch(
        trained: TrainedModel,
        prefixes: Sequence[Union[EventPrefixRecord, Sequence[Event]]],
        case_attrs: Optional[Sequence] = None,
) -> np.ndarray:
    """
    批量预测剩余时间（秒）

    Args:
        trained: 训练好的模型
        prefixes: 前缀记录或事件序列
        case_attrs: 可选，与 prefixes 对齐的 case 级属性
    """
    stats = trained.stats
    layout = layout_from_stats(stats)
    graphs = []
    for i, prefix in enumerate(prefixes):
        record = _as_record(prefix)
        attrs = case_attrs[i] if case_attrs is not None else None
        graphs.append(build_graph(record, stats, attrs, layout))
    cfg = trained.model_config
    graphs = encode_dataset(graphs, cfg.d_pe, cfg.d_se, cfg.rwse_undirected)
    normalized = predict_normalized(trained.model, graphs)
    return np.array([denormalize(v, stats) for v in normalized], dtype=np.float64)


def predict(
        trained: TrainedModel,
        prefix: Union[EventPrefixRecord, Sequence[Event]],
        case_attrs=None,
) -> RemainingTime:
    """
    预测单个前缀的剩余时间

    Raises:
        PrefixTooShort: 前缀少于 2 个事件
    """
    seconds = float(predict_batch(trained, [prefix], None if case_attrs is None else [case_attrs])[0])
    return RemainingTime(seconds, seconds_to_days(seconds))

