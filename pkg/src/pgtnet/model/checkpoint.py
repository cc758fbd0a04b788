"""
模型检查点

A single torch file holding the version string, the config echo, the
vocabulary/edge sizes, every parameter tensor and its shape.
"""

import io
import logging
from collections import OrderedDict
from pathlib import Path
from typing import Optional

import torch

from pgtnet.errors import SchemaVersionMismatch, ShapeMismatch
from pgtnet.model.config import PGTNetConfig
from pgtnet.model.network import PGTNet

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = "pgtnet-checkpoint/1"


def checkpoint_payload(model: PGTNet, extra: Optional[dict] = None) -> dict:
    state = OrderedDict((name, tensor.detach().cpu().clone()) for name, tensor in model.state_dict().items())
    payload = {
        "version": CHECKPOINT_VERSION,
        "config": model.config.to_dict(),
        "vocab_size": model.vocab_size,
        "edge_dim": model.edge_dim,
        "shapes": {name: list(tensor.shape) for name, tensor in state.items()},
        "state_dict": state,
    }
    if extra:
        payload["extra"] = extra
    return payload


def save_checkpoint(model: PGTNet, path, extra: Optional[dict] = None) -> Path:
    path = Path(path)
    buffer = io.BytesIO()
    # buffer archives get a fixed internal name
    torch.save(checkpoint_payload(model, extra), buffer)
    path.write_bytes(buffer.getvalue())
    logger.info("✅ 保存检查点 %s", path)
    return path


def model_from_payload(payload: dict) -> PGTNet:
    if payload.get("version") != CHECKPOINT_VERSION:
        raise SchemaVersionMismatch(f"expected checkpoint {CHECKPOINT_VERSION!r}, found {payload.get('version')!r}")
    config = PGTNetConfig.from_dict(payload["config"])
    model = PGTNet(config, int(payload["vocab_size"]), int(payload["edge_dim"]))
    state = payload["state_dict"]
    for name, shape in payload["shapes"].items():
        if list(state[name].shape) != list(shape):
            raise ShapeMismatch(f"checkpoint tensor {name} has shape {list(state[name].shape)}, header says {shape}")
    model.load_state_dict(state)
    model.eval()
    return model


def load_checkpoint(path):
    """
    读取检查点

    Returns:
        (model, extra)：extra 为保存时附带的字典（可能为空）
    """
    payload = torch.load(Path(path), map_location="cpu", weights_only=False)
    return model_from_payload(payload), payload.get("extra", {})
