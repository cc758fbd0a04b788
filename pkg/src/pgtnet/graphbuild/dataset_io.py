"""
图数据集读写

JSON-lines file: a header line carrying the schema version, then one graph per
line. Reals are written with Python's shortest round-trip repr, so a read after
a write is bit-equal.
"""

import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from pgtnet.encodings import GraphEncodings
from pgtnet.errors import SchemaVersionMismatch
from pgtnet.graphbuild.builder import PrefixGraph
from pgtnet.graphbuild.layout import layout_from_stats
from pgtnet.graphbuild.stats import NormalizationStats
from pgtnet.utils.utils import canonical_json

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "pgtnet-graphs/1"
STATS_SCHEMA_VERSION = "pgtnet-stats/1"


def graph_to_dict(graph: PrefixGraph) -> dict:
    record = {
        "case_id": graph.case_id,
        "k": graph.k,
        "node_class_ids": list(graph.node_class_ids),
        "edges": [list(edge) for edge in graph.edges],
        "edge_features": [list(vector) for vector in graph.edge_features],
        "target": graph.target_normalized,
    }
    enc = graph.encodings
    if enc is not None:
        record["lap_pe"] = enc.lap_pe.tolist()
        record["lap_eigs"] = enc.lap_eigenvalues.tolist()
        record["rwse"] = enc.rwse.tolist()
        if enc.rwse_undirected:
            record["rwse_undirected"] = True
    return record


def graph_from_dict(record: dict) -> PrefixGraph:
    encodings = None
    if "lap_pe" in record:
        n = len(record["node_class_ids"])
        encodings = GraphEncodings(
            lap_pe=np.asarray(record["lap_pe"], dtype=np.float64).reshape(n, -1),
            lap_eigenvalues=np.asarray(record["lap_eigs"], dtype=np.float64),
            rwse=np.asarray(record["rwse"], dtype=np.float64).reshape(n, -1),
            rwse_undirected=bool(record.get("rwse_undirected", False)),
        )
    return PrefixGraph(
        node_class_ids=tuple(int(i) for i in record["node_class_ids"]),
        edges=tuple((int(s), int(t)) for s, t in record["edges"]),
        edge_features=tuple(tuple(float(x) for x in vector) for vector in record["edge_features"]),
        target_normalized=float(record["target"]),
        case_id=str(record["case_id"]),
        k=int(record["k"]),
        encodings=encodings,
    )


def write_dataset(graphs: Sequence[PrefixGraph], path, manifest_hash: Optional[str] = None) -> Path:
    """
    写出图数据集 (JSONL)

    Args:
        graphs: 图序列，按给定顺序写出
        path: 输出文件
        manifest_hash: 运行清单哈希

    Returns:
        输出文件路径
    """
    path = Path(path)
    header = {"schema_version": SCHEMA_VERSION, "count": len(graphs)}
    if manifest_hash:
        header["manifest_hash"] = manifest_hash
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json(header) + "\n")
        for graph in graphs:
            fh.write(canonical_json(graph_to_dict(graph)) + "\n")
    logger.info("写出图数据集 %s (%d 个图)", path, len(graphs))
    return path


def read_dataset(path) -> List[PrefixGraph]:
    """
    读取图数据集

    Raises:
        SchemaVersionMismatch: 头部缺失或版本不符
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        try:
            header = json.loads(first) if first.strip() else {}
        except json.JSONDecodeError as e:
            raise SchemaVersionMismatch(f"{path}: header line is not JSON") from e
        version = header.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaVersionMismatch(f"{path}: expected {SCHEMA_VERSION!r}, found {version!r}")
        graphs = [graph_from_dict(json.loads(line)) for line in fh if line.strip()]
    if "count" in header and header["count"] != len(graphs):
        raise SchemaVersionMismatch(f"{path}: header announces {header['count']} graphs, file holds {len(graphs)}")
    return graphs


def write_stats(stats: NormalizationStats, path, manifest_hash: Optional[str] = None) -> Path:
    """Sidecar with the fitted statistics and the edge-feature layout manifest."""
    path = Path(path)
    document = {
        "schema_version": STATS_SCHEMA_VERSION,
        "stats": stats.to_dict(),
        "layout": layout_from_stats(stats).to_manifest(),
    }
    if manifest_hash:
        document["manifest_hash"] = manifest_hash
    path.write_text(json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def read_stats(path) -> NormalizationStats:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    version = document.get("schema_version")
    if version != STATS_SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"{path}: expected {STATS_SCHEMA_VERSION!r}, found {version!r}")
    return NormalizationStats.from_dict(document["stats"])
