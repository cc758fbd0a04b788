"""
训练配置
"""

from dataclasses import asdict, dataclass, fields
from typing import Optional

from pgtnet.errors import ConfigError


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 600
    warmup_epochs: int = 50
    base_lr: float = 1e-3
    weight_decay: float = 1e-5
    batch_size: int = 128
    seed: int = 42
    early_stop_patience: Optional[int] = None
    checkpoint_every: Optional[int] = None
    lap_sign_flip: bool = False

    def __post_init__(self):
        if self.epochs <= 0 or self.batch_size <= 0:
            raise ConfigError("epochs and batch_size must be positive")
        if not 0 <= self.warmup_epochs < self.epochs:
            raise ConfigError(f"warmup_epochs must be in [0, epochs), got {self.warmup_epochs}")
        if self.base_lr <= 0 or self.weight_decay < 0:
            raise ConfigError("base_lr must be positive and weight_decay non-negative")
        for name in ("early_stop_patience", "checkpoint_every"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ConfigError(f"{name} must be positive when set, got {value}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown train config keys: {unknown}")
        return cls(**raw)
