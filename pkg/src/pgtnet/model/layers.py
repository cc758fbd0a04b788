"""
GPS 层

Each layer runs a GINE message-passing block and a per-graph multi-head
self-attention block in parallel, sums them and passes the sum through a
two-layer network. Edge representations are read by the MPNN block only and
leave the layer unchanged.
"""

import math

import torch
import torch.nn.functional as F
from torch import nn
from torch_geometric.nn import GINEConv
from torch_geometric.utils import softmax

from pgtnet.errors import ShapeMismatch
from pgtnet.model.config import PGTNetConfig


def two_layer_mlp(in_dim: int, hidden_dim: int, out_dim: int) -> nn.Sequential:
    return nn.Sequential(nn.Linear(in_dim, hidden_dim), nn.ReLU(), nn.Linear(hidden_dim, out_dim))


class GraphAttention(nn.Module):
    """
    Multi-head self-attention restricted to nodes of the same graph.

    Scores are computed only for intra-graph (query, key) pairs and normalized
    with a sparse softmax grouped by query node.
    """

    def __init__(self, hidden_dim: int, num_heads: int, dropout: float = 0.0):
        super().__init__()
        self.num_heads = num_heads
        self.head_dim = hidden_dim // num_heads
        self.dropout = dropout
        self.q_proj = nn.Linear(hidden_dim, hidden_dim)
        self.k_proj = nn.Linear(hidden_dim, hidden_dim)
        self.v_proj = nn.Linear(hidden_dim, hidden_dim)
        self.o_proj = nn.Linear(hidden_dim, hidden_dim)

    def forward(self, x: torch.Tensor, query: torch.Tensor, key: torch.Tensor) -> torch.Tensor:
        n = x.size(0)
        q = self.q_proj(x).view(n, self.num_heads, self.head_dim)
        k = self.k_proj(x).view(n, self.num_heads, self.head_dim)
        v = self.v_proj(x).view(n, self.num_heads, self.head_dim)

        scores = (q[query] * k[key]).sum(dim=-1) / math.sqrt(self.head_dim)  # (P, heads)
        alpha = softmax(scores, index=query, num_nodes=n)
        alpha = F.dropout(alpha, p=self.dropout, training=self.training)

        out = torch.zeros_like(v).index_add_(0, query, alpha.unsqueeze(-1) * v[key])
        return self.o_proj(out.reshape(n, -1))


class GPSLayer(nn.Module):
    """
    X_M = GINE(X, Z), X_T = attention(X), X' = MLP(X_M + X_T).

    With ``residual_and_norm`` both branches get a residual connection and a
    LayerNorm, and the MLP is applied as a residual update followed by a norm.
    """

    def __init__(self, config: PGTNetConfig):
        super().__init__()
        h = config.hidden_dim
        self.residual_and_norm = config.residual_and_norm
        self.mpnn_dropout = config.mpnn_dropout
        self.mpnn = GINEConv(two_layer_mlp(h, h, h), train_eps=True, edge_dim=h)
        self.attention = GraphAttention(h, config.num_heads, config.attn_dropout)
        self.mlp = two_layer_mlp(h, h, h)
        if self.residual_and_norm:
            self.norm_mpnn = nn.LayerNorm(h)
            self.norm_attn = nn.LayerNorm(h)
            self.norm_out = nn.LayerNorm(h)

    def forward(
            self,
            x: torch.Tensor,
            edge_index: torch.Tensor,
            edge_repr: torch.Tensor,
            pairs: tuple,
    ):
        if x.size(-1) != edge_repr.size(-1):
            raise ShapeMismatch(f"node width {x.size(-1)} != edge width {edge_repr.size(-1)}")
        x_m = self.mpnn(x, edge_index, edge_repr)
        x_m = F.dropout(x_m, p=self.mpnn_dropout, training=self.training)
        x_t = self.attention(x, *pairs)

        if not self.residual_and_norm:
            return self.mlp(x_m + x_t), edge_repr

        x_m = self.norm_mpnn(x + x_m)
        x_t = self.norm_attn(x + x_t)
        combined = x_m + x_t
        return self.norm_out(combined + self.mlp(combined)), edge_repr
