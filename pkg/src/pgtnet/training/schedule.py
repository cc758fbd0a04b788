import math

from pgtnet.training.config import TrainConfig


def lr_schedule(epoch: int, config: TrainConfig) -> float:
    """
    Linear warmup from 0 to base_lr, then cosine decay over the remaining epochs.

    Args:
        epoch: 0-based epoch, 0 ≤ epoch < epochs
        config: 训练配置

    Returns:
        学习率
    """
    if not 0 <= epoch < config.epochs:
        raise ValueError(f"epoch {epoch} outside [0, {config.epochs})")
    warmup = config.warmup_epochs
    if epoch < warmup:
        return config.base_lr * epoch / warmup
    progress = (epoch - warmup) / (config.epochs - warmup)
    return config.base_lr * 0.5 * (1.0 + math.cos(math.pi * progress))
