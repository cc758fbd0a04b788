"""
训练：AdamW + 余弦预热学习率，按验证损失保留最优模型
"""

from pgtnet.training.config import TrainConfig
from pgtnet.training.optimizer import AdamW
from pgtnet.training.schedule import lr_schedule
from pgtnet.training.trainer import (
    EpochRecord,
    RemainingTime,
    TrainedModel,
    denormalize,
    load_trained,
    predict,
    predict_batch,
    save_trained,
    train_model,
    write_metrics_csv,
)

__all__ = [
    "TrainConfig",
    "AdamW",
    "lr_schedule",
    "EpochRecord",
    "RemainingTime",
    "TrainedModel",
    "denormalize",
    "load_trained",
    "predict",
    "predict_batch",
    "save_trained",
    "train_model",
    "write_metrics_csv",
]
