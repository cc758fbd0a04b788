"""
Edge feature layout

[weight, t1 … t5, case numeric, case one-hot, event numeric, event one-hot, workload]
with every attribute block ordered by attribute name.
"""

from dataclasses import dataclass
from typing import List, Tuple

from pgtnet.eventlog.model import AttributeKind, AttributeScope
from pgtnet.graphbuild.stats import NormalizationStats

TEMPORAL_FEATURES = ("t1_total_duration", "t2_last_duration", "t3_since_case_start",
                     "t4_since_day_start", "t5_since_week_start")


@dataclass(frozen=True)
class FeatureBlock:
    name: str
    start: int
    stop: int
    attribute: str = ""
    categories: Tuple[str, ...] = ()

    @property
    def width(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True)
class FeatureLayout:
    blocks: Tuple[FeatureBlock, ...]

    @property
    def width(self) -> int:
        return self.blocks[-1].stop if self.blocks else 0

    def block(self, name: str) -> FeatureBlock:
        for block in self.blocks:
            if block.name == name:
                return block
        raise KeyError(name)

    def to_manifest(self) -> List[dict]:
        return [
            {"name": b.name, "start": b.start, "stop": b.stop, "attribute": b.attribute,
             "categories": list(b.categories)}
            for b in self.blocks
        ]


def layout_from_stats(stats: NormalizationStats) -> FeatureLayout:
    blocks = []
    cursor = 0

    def add(name: str, width: int, attribute: str = "", categories: Tuple[str, ...] = ()):
        nonlocal cursor
        blocks.append(FeatureBlock(name, cursor, cursor + width, attribute, categories))
        cursor += width

    add("weight", 1)
    for name in TEMPORAL_FEATURES:
        add(name, 1)
    for scope in (AttributeScope.CASE, AttributeScope.EVENT):
        for attr in stats.attribute_names(AttributeKind.NUMERIC, scope):
            add(f"{scope.value}_numeric:{attr}", 1, attr)
        for attr in stats.attribute_names(AttributeKind.CATEGORICAL, scope):
            vocab = stats.categorical_vocabs[attr]
            add(f"{scope.value}_onehot:{attr}", len(vocab), attr, vocab)
    add("workload", 1)
    return FeatureLayout(tuple(blocks))
