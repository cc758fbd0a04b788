"""
前缀图构建

fit_stats → build_graph / build_dataset → write_dataset / read_dataset
"""

from pgtnet.graphbuild.builder import PrefixGraph, build_dataset, build_graph, directly_follows
from pgtnet.graphbuild.dataset_io import read_dataset, read_stats, write_dataset, write_stats
from pgtnet.graphbuild.layout import FeatureLayout, layout_from_stats
from pgtnet.graphbuild.stats import UNKNOWN_CLASS_ID, NormalizationStats, fit_stats

__all__ = [
    "PrefixGraph",
    "build_dataset",
    "build_graph",
    "directly_follows",
    "read_dataset",
    "read_stats",
    "write_dataset",
    "write_stats",
    "FeatureLayout",
    "layout_from_stats",
    "UNKNOWN_CLASS_ID",
    "NormalizationStats",
    "fit_stats",
]
