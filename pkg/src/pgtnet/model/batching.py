"""
图批处理

Graphs are concatenated into one disjoint union (torch_geometric ``Batch``);
``batch.batch`` maps every node to its graph, edge indices are offset per graph.
No zero padding is involved.
"""

from typing import Sequence, Tuple

import torch
from torch_geometric.data import Batch, Data

from pgtnet.errors import ShapeMismatch
from pgtnet.graphbuild.builder import PrefixGraph


def to_data(graph: PrefixGraph, edge_dim: int, dtype: torch.dtype = torch.float64) -> Data:
    """
    PrefixGraph → torch_geometric Data

    Raises:
        ShapeMismatch: 边特征维度不符或缺少编码
    """
    if graph.encodings is None:
        raise ShapeMismatch(f"graph ({graph.case_id}, k={graph.k}) has no positional/structural encodings")
    if graph.edge_features and len(graph.edge_features[0]) != edge_dim:
        raise ShapeMismatch(f"edge features have {len(graph.edge_features[0])} entries, model expects {edge_dim}")
    enc = graph.encodings
    n = graph.num_nodes
    if enc.lap_pe.shape[0] != n or enc.rwse.shape[0] != n:
        raise ShapeMismatch(f"encodings cover {enc.lap_pe.shape[0]} nodes, graph has {n}")

    edge_index = torch.tensor(graph.edges, dtype=torch.long).reshape(-1, 2).t().contiguous()
    edge_attr = torch.tensor(graph.edge_features, dtype=dtype).reshape(-1, edge_dim)
    return Data(
        x=torch.tensor(graph.node_class_ids, dtype=torch.long),
        edge_index=edge_index,
        edge_attr=edge_attr,
        lap_pe=torch.as_tensor(enc.lap_pe, dtype=dtype),
        rwse=torch.as_tensor(enc.rwse, dtype=dtype),
        y=torch.tensor([graph.target_normalized], dtype=dtype),
        num_nodes=n,
    )


def collate(graphs: Sequence[PrefixGraph], edge_dim: int, dtype: torch.dtype = torch.float64) -> Batch:
    if not graphs:
        raise ValueError("cannot collate an empty list of graphs")
    return Batch.from_data_list([to_data(g, edge_dim, dtype) for g in graphs])


def intra_graph_pairs(batch_vector: torch.Tensor, ptr: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
    """
    All ordered (query, key) node pairs that share a graph.

    Returns:
        (query, key) index tensors of length Σ n_g²
    """
    sizes = ptr[1:] - ptr[:-1]
    reps = sizes[batch_vector]
    query = torch.repeat_interleave(torch.arange(batch_vector.numel(), device=batch_vector.device), reps)
    block_start = torch.cumsum(reps, 0) - reps
    offsets = torch.arange(int(reps.sum()), device=batch_vector.device) - torch.repeat_interleave(block_start, reps)
    key = torch.repeat_interleave(ptr[batch_vector], reps) + offsets
    return query, key
