"""
PGTNet 网络

embed → H × GPSLayer → 图级 readout → 2 层回归头
"""

import logging
from typing import Dict, Optional, Tuple

import torch
import torch.nn.functional as F
from torch import nn
from torch_geometric.data import Batch
from torch_geometric.nn import global_add_pool, global_mean_pool
from torch_geometric.nn.dense.linear import Linear as PygLinear

from pgtnet.errors import NonFiniteGradient, NonFiniteOutput, ShapeMismatch
from pgtnet.model.batching import intra_graph_pairs
from pgtnet.model.config import PGTNetConfig, Readout
from pgtnet.model.layers import GPSLayer, two_layer_mlp

logger = logging.getLogger(__name__)

EMBEDDING_INIT_STD = 0.02


class PGTNet(nn.Module):
    """
    Process graph transformer for remaining-time regression.

    Args:
        config: 模型配置
        vocab_size: 节点嵌入表行数（已知事件类 + UNKNOWN）
        edge_dim: 边特征维度
    """

    def __init__(self, config: PGTNetConfig, vocab_size: int, edge_dim: int):
        super().__init__()
        if vocab_size <= 0 or edge_dim <= 0:
            raise ShapeMismatch(f"vocab_size and edge_dim must be positive, got {vocab_size}, {edge_dim}")
        self.config = config
        self.vocab_size = vocab_size
        self.edge_dim = edge_dim
        h = config.hidden_dim

        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(config.seed)
            self.node_embedding = nn.Embedding(vocab_size, h)
            if config.edge_encoder_layers == 2:
                self.edge_encoder = two_layer_mlp(edge_dim, h, h)
            else:
                self.edge_encoder = nn.Sequential(nn.Linear(edge_dim, h))
            self.pe_mlp = two_layer_mlp(config.d_pe, h, h)
            self.se_mlp = two_layer_mlp(config.d_se, h, h)
            self.layers = nn.ModuleList(GPSLayer(config) for _ in range(config.num_layers))
            self.head = two_layer_mlp(h, h, 1)
            self.reset_parameters()
        self.to(config.dtype)

    def reset_parameters(self) -> None:
        """Xavier-uniform dense weights, zero biases, N(0, 0.02) embedding rows, GIN ε = 0."""
        for module in self.modules():
            if isinstance(module, (nn.Linear, PygLinear)):
                nn.init.xavier_uniform_(module.weight)
                if module.bias is not None:
                    nn.init.zeros_(module.bias)
            elif isinstance(module, nn.LayerNorm):
                nn.init.ones_(module.weight)
                nn.init.zeros_(module.bias)
        nn.init.normal_(self.node_embedding.weight, mean=0.0, std=EMBEDDING_INIT_STD)
        for layer in self.layers:
            layer.mpnn.eps.data.zero_()

    # ==================== 前向计算 ====================

    def embed(self, batch: Batch) -> Tuple[torch.Tensor, torch.Tensor]:
        """
        X0 = E[class] + f_PE(lap_pe) + f_SE(rwse); Z0 = edge encoder(edge features).

        Raises:
            ShapeMismatch: 输入维度与配置不符
        """
        if batch.lap_pe.size(-1) != self.config.d_pe or batch.rwse.size(-1) != self.config.d_se:
            raise ShapeMismatch(
                f"encodings have d_pe={batch.lap_pe.size(-1)}, d_se={batch.rwse.size(-1)}; "
                f"model expects {self.config.d_pe}, {self.config.d_se}"
            )
        if batch.edge_attr.size(-1) != self.edge_dim:
            raise ShapeMismatch(f"edge features have width {batch.edge_attr.size(-1)}, model expects {self.edge_dim}")
        if batch.x.numel() and int(batch.x.max()) >= self.vocab_size:
            raise ShapeMismatch(f"class id {int(batch.x.max())} outside vocabulary of {self.vocab_size}")
        x = self.node_embedding(batch.x) + self.pe_mlp(batch.lap_pe) + self.se_mlp(batch.rwse)
        z = self.edge_encoder(batch.edge_attr)
        return x, z

    def encode(self, batch: Batch) -> torch.Tensor:
        """Node representations after the last GPS layer."""
        x, z = self.embed(batch)
        pairs = intra_graph_pairs(batch.batch, batch.ptr)
        for layer in self.layers:
            x, z = layer(x, batch.edge_index, z, pairs)
        return x

    def pool(self, batch: Batch) -> torch.Tensor:
        """Graph-level representation (num_graphs × hidden_dim)."""
        x = self.encode(batch)
        if self.config.readout == Readout.SUM:
            return global_add_pool(x, batch.batch, size=batch.num_graphs)
        return global_mean_pool(x, batch.batch, size=batch.num_graphs)

    def forward(self, batch: Batch) -> torch.Tensor:
        """
        一图一个预测值（归一化剩余时间）

        Raises:
            NonFiniteOutput: 输出含 NaN/inf
        """
        out = self.head(self.pool(batch)).squeeze(-1)
        if not torch.isfinite(out).all():
            raise NonFiniteOutput("forward pass produced non-finite predictions")
        return out


def l1_loss(predictions: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    # sign(0) = 0, so the subgradient at zero error is 0
    return F.l1_loss(predictions, targets, reduction="mean")


def backward(
        model: PGTNet,
        batch: Batch,
        targets: Optional[torch.Tensor] = None,
) -> Tuple[float, Dict[str, torch.Tensor]]:
    """
    计算 L1 损失及所有参数的梯度

    The caller fixes train/eval mode and the dropout seed. Gradients are left
    in ``.grad`` for the optimizer and also returned by parameter name.

    Raises:
        NonFiniteGradient: 任一梯度含 NaN/inf
    """
    targets = batch.y if targets is None else targets
    model.zero_grad(set_to_none=False)
    loss = l1_loss(model(batch), targets)
    loss.backward()
    grads = {}
    for name, param in model.named_parameters():
        grad = param.grad if param.grad is not None else torch.zeros_like(param)
        if not torch.isfinite(grad).all():
            raise NonFiniteGradient(f"gradient of {name} is not finite")
        grads[name] = grad.detach().clone()
    return float(loss.detach()), grads
