"""
位置/结构编码 (LapPE, RWSE)

LapPE: eigenvectors of the normalized Laplacian of the symmetrized, unweighted
skeleton. RWSE: return probabilities of a random walk on the directed edges.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

if TYPE_CHECKING:
    from pgtnet.graphbuild.builder import PrefixGraph

logger = logging.getLogger(__name__)

ZERO_EIGENVALUE_TOL = 1e-8
SIGN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GraphEncodings:
    lap_pe: np.ndarray           # (n, d_pe)
    lap_eigenvalues: np.ndarray  # (d_pe,)
    rwse: np.ndarray             # (n, d_se)
    rwse_undirected: bool = False

    @property
    def d_pe(self) -> int:
        return self.lap_eigenvalues.shape[0]

    @property
    def d_se(self) -> int:
        return self.rwse.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphEncodings):
            return NotImplemented
        return (self.rwse_undirected == other.rwse_undirected
                and np.array_equal(self.lap_pe, other.lap_pe)
                and np.array_equal(self.lap_eigenvalues, other.lap_eigenvalues)
                and np.array_equal(self.rwse, other.rwse))

    __hash__ = None


def _directed_adjacency(num_nodes: int, edges: Sequence[Tuple[int, int]]) -> np.ndarray:
    adjacency = np.zeros((num_nodes, num_nodes), dtype=np.float64)
    if edges:
        src, dst = np.asarray(edges, dtype=np.int64).T
        adjacency[src, dst] = 1.0
    return adjacency


def symmetric_skeleton(num_nodes: int, edges: Sequence[Tuple[int, int]]) -> np.ndarray:
    """sign(A + Aᵀ) without self-loops."""
    adjacency = _directed_adjacency(num_nodes, edges)
    skeleton = np.maximum(adjacency, adjacency.T)
    np.fill_diagonal(skeleton, 0.0)
    return skeleton


def normalized_laplacian(num_nodes: int, edges: Sequence[Tuple[int, int]]) -> np.ndarray:
    """
    L = I − D^{-1/2} A D^{-1/2} on the skeleton; isolated nodes get a zero row
    and column (degree term 0).
    """
    skeleton = symmetric_skeleton(num_nodes, edges)
    degree = skeleton.sum(axis=1)
    connected = degree > 0
    inv_sqrt = np.zeros_like(degree)
    inv_sqrt[connected] = 1.0 / np.sqrt(degree[connected])
    return np.diag(connected.astype(np.float64)) - inv_sqrt[:, None] * skeleton * inv_sqrt[None, :]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip every column so that its first nonzero component is positive."""
    out = vectors.copy()
    for col in range(out.shape[1]):
        nonzero = np.flatnonzero(np.abs(out[:, col]) > SIGN_TOL)
        if nonzero.size and out[nonzero[0], col] < 0:
            out[:, col] = -out[:, col]
    return out


def compute_lap_pe(graph: "PrefixGraph", d_pe: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    计算 Laplacian 特征向量位置编码

    Args:
        graph: 前缀图（至少 1 个节点）
        d_pe: 编码维度

    Returns:
        (lap_pe: n×d_pe, eigenvalues: d_pe)，不足时补零
    """
    n = graph.num_nodes
    if n < 1:
        raise ValueError("graph has no nodes")
    laplacian = normalized_laplacian(n, graph.edges)
    eigenvalues, eigenvectors = np.linalg.eigh(laplacian)

    num_components, _ = connected_components(csr_matrix(symmetric_skeleton(n, graph.edges)), directed=False)
    # one trivial eigenpair per connected component
    trivial = min(num_components, int(np.sum(eigenvalues < ZERO_EIGENVALUE_TOL)))
    eigenvalues = eigenvalues[trivial:trivial + d_pe]
    eigenvectors = _fix_signs(eigenvectors[:, trivial:trivial + d_pe])

    lap_pe = np.zeros((n, d_pe), dtype=np.float64)
    lap_eigs = np.zeros(d_pe, dtype=np.float64)
    lap_pe[:, :eigenvectors.shape[1]] = eigenvectors
    lap_eigs[:eigenvalues.shape[0]] = eigenvalues
    return lap_pe, lap_eigs


def compute_rwse(graph: "PrefixGraph", d_se: int, undirected: bool = False) -> np.ndarray:
    """
    计算随机游走结构编码

    rwse[v, s-1] = (P^s)[v, v] for s = 1 … d_se with P = D_out^{-1} A; self-loops
    count as edges, rows of sink nodes stay zero.

    Args:
        graph: 前缀图
        d_se: 游走步数
        undirected: 在对称化的边结构上游走（保留自环）
    """
    n = graph.num_nodes
    if n < 1:
        raise ValueError("graph has no nodes")
    adjacency = _directed_adjacency(n, graph.edges)
    if undirected:
        adjacency = np.maximum(adjacency, adjacency.T)
    out_degree = adjacency.sum(axis=1)
    transition = np.zeros_like(adjacency)
    has_out = out_degree > 0
    transition[has_out] = adjacency[has_out] / out_degree[has_out, None]

    rwse = np.zeros((n, d_se), dtype=np.float64)
    power = transition
    for step in range(d_se):
        rwse[:, step] = np.diagonal(power)
        power = power @ transition
    return np.clip(rwse, 0.0, 1.0)


def attach_encodings(
        graph: "PrefixGraph",
        d_pe: int,
        d_se: int,
        rwse_undirected: bool = False,
) -> GraphEncodings:
    lap_pe, lap_eigs = compute_lap_pe(graph, d_pe)
    return GraphEncodings(lap_pe, lap_eigs, compute_rwse(graph, d_se, rwse_undirected), rwse_undirected)


def encode_dataset(
        graphs: Sequence["PrefixGraph"],
        d_pe: int,
        d_se: int,
        rwse_undirected: bool = False,
) -> List["PrefixGraph"]:
    """
    为数据集中的每个图附加编码

    Graphs whose cached encodings already have the requested sizes and RWSE
    variant keep them.
    """
    out = []
    recomputed = 0
    for graph in graphs:
        enc = graph.encodings
        if (enc is not None and enc.d_pe == d_pe and enc.d_se == d_se
                and enc.rwse_undirected == rwse_undirected):
            out.append(graph)
            continue
        out.append(graph.with_encodings(attach_encodings(graph, d_pe, d_se, rwse_undirected)))
        recomputed += 1
    logger.debug("计算编码: %d / %d 个图", recomputed, len(graphs))
    return out
