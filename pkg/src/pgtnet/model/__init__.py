"""
PGTNet 模型
"""

from pgtnet.model.batching import collate, intra_graph_pairs, to_data
from pgtnet.model.checkpoint import load_checkpoint, save_checkpoint
from pgtnet.model.config import PGTNetConfig, Precision, Readout
from pgtnet.model.layers import GPSLayer, GraphAttention
from pgtnet.model.network import PGTNet, backward, l1_loss

__all__ = [
    "collate",
    "intra_graph_pairs",
    "to_data",
    "load_checkpoint",
    "save_checkpoint",
    "PGTNetConfig",
    "Precision",
    "Readout",
    "GPSLayer",
    "GraphAttention",
    "PGTNet",
    "backward",
    "l1_loss",
]
