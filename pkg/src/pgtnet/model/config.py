"""
模型配置
"""

from dataclasses import asdict, dataclass, fields
from enum import Enum

import torch

from pgtnet.errors import ConfigError


class Readout(str, Enum):
    MEAN = "mean"
    SUM = "sum"


class Precision(str, Enum):
    DOUBLE = "double"
    SINGLE = "single"


@dataclass(frozen=True)
class PGTNetConfig:
    hidden_dim: int = 64
    num_layers: int = 5
    num_heads: int = 8
    d_pe: int = 8
    d_se: int = 8
    edge_encoder_layers: int = 2
    mpnn_dropout: float = 0.0
    attn_dropout: float = 0.5
    readout: Readout = Readout.MEAN
    residual_and_norm: bool = True
    rwse_undirected: bool = False
    seed: int = 42
    precision: Precision = Precision.DOUBLE

    def __post_init__(self):
        # accept plain strings from config files
        try:
            object.__setattr__(self, "readout", Readout(self.readout))
            object.__setattr__(self, "precision", Precision(self.precision))
        except ValueError as e:
            raise ConfigError(str(e)) from e
        for name in ("hidden_dim", "num_layers", "num_heads", "d_pe", "d_se"):
            if int(getattr(self, name)) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.hidden_dim % self.num_heads:
            raise ConfigError(f"hidden_dim {self.hidden_dim} is not divisible by num_heads {self.num_heads}")
        if self.edge_encoder_layers not in (1, 2):
            raise ConfigError(f"edge_encoder_layers must be 1 or 2, got {self.edge_encoder_layers}")
        for name in ("mpnn_dropout", "attn_dropout"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {getattr(self, name)}")

    @property
    def dtype(self) -> torch.dtype:
        return torch.float64 if self.precision == Precision.DOUBLE else torch.float32

    def to_dict(self) -> dict:
        raw = asdict(self)
        raw["readout"] = self.readout.value
        raw["precision"] = self.precision.value
        return raw

    @classmethod
    def from_dict(cls, raw: dict) -> "PGTNetConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown model config keys: {unknown}")
        return cls(**raw)
