"""
配置加载

Layering: built-in profile → optional TOML/JSON file with [model] and [train]
tables → explicit overrides (CLI flags).
"""

import json
import logging
import os
import tomllib
from pathlib import Path
from typing import Mapping, Optional, Tuple

from pgtnet.errors import ConfigError
from pgtnet.model.config import PGTNetConfig
from pgtnet.training.config import TrainConfig

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42

PROFILES = {
    "paper": {
        "model": {
            "hidden_dim": 64, "num_layers": 5, "num_heads": 8, "d_pe": 8, "d_se": 8,
            "edge_encoder_layers": 2, "mpnn_dropout": 0.0, "attn_dropout": 0.5, "readout": "mean",
        },
        "train": {
            "epochs": 600, "warmup_epochs": 50, "base_lr": 1e-3, "weight_decay": 1e-5, "batch_size": 128,
        },
    },
    "desk": {
        "model": {
            "hidden_dim": 32, "num_layers": 3, "num_heads": 4, "d_pe": 8, "d_se": 8,
            "edge_encoder_layers": 2, "mpnn_dropout": 0.0, "attn_dropout": 0.5, "readout": "mean",
        },
        "train": {
            "epochs": 300, "warmup_epochs": 20, "base_lr": 1e-3, "weight_decay": 1e-5, "batch_size": 32,
        },
    },
    # 10 layers with 4 heads and MPNN dropout 0.2
    "paper-deep": {
        "model": {
            "hidden_dim": 64, "num_layers": 10, "num_heads": 4, "d_pe": 8, "d_se": 8,
            "edge_encoder_layers": 2, "mpnn_dropout": 0.2, "attn_dropout": 0.5, "readout": "mean",
        },
        "train": {
            "epochs": 600, "warmup_epochs": 50, "base_lr": 1e-3, "weight_decay": 1e-5, "batch_size": 128,
        },
    },
}


def default_seed() -> int:
    raw = os.getenv("PGTNET_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"PGTNET_SEED must be an integer, got {raw!r}") from e


def load_config_file(path) -> dict:
    """
    读取配置文件（.toml 或 .json）

    Returns:
        {"model": {...}, "train": {...}}
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix.lower() == ".toml":
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        else:
            raw = json.loads(path.read_text(encoding="utf-8"))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot parse config file {path}: {e}") from e
    unknown = sorted(set(raw) - {"model", "train"})
    if unknown:
        raise ConfigError(f"unknown config tables in {path}: {unknown}")
    return {"model": dict(raw.get("model", {})), "train": dict(raw.get("train", {}))}


def resolve_configs(
        profile: str = "desk",
        config_path=None,
        model_overrides: Optional[Mapping] = None,
        train_overrides: Optional[Mapping] = None,
        seed: Optional[int] = None,
) -> Tuple[PGTNetConfig, TrainConfig]:
    """
    合并 profile、配置文件与命令行覆盖项

    Args:
        profile: paper / desk / paper-deep
        config_path: 可选配置文件
        model_overrides: 模型覆盖项（值为 None 的键忽略）
        train_overrides: 训练覆盖项（值为 None 的键忽略）
        seed: 主随机种子，同时用于模型初始化与训练

    Raises:
        ConfigError: 未知 profile、未知键或非法取值
    """
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r} (expected one of {sorted(PROFILES)})")
    model = dict(PROFILES[profile]["model"])
    train = dict(PROFILES[profile]["train"])
    if config_path:
        file_values = load_config_file(config_path)
        model.update(file_values["model"])
        train.update(file_values["train"])
    model.update({k: v for k, v in (model_overrides or {}).items() if v is not None})
    train.update({k: v for k, v in (train_overrides or {}).items() if v is not None})

    if seed is not None:
        model["seed"] = train["seed"] = int(seed)
    else:
        model.setdefault("seed", default_seed())
        train.setdefault("seed", default_seed())
    try:
        model_config = PGTNetConfig.from_dict(model)
        train_config = TrainConfig.from_dict(train)
    except TypeError as e:
        raise ConfigError(str(e)) from e
    logger.debug("配置: profile=%s, model=%s, train=%s", profile, model_config.to_dict(), train_config.to_dict())
    return model_config, train_config
