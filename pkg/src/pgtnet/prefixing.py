"""
前缀构建与数据划分

Event prefixes of length 2 … |σ|−1 with their remaining-time targets, and
case-level cross-validation / chronological holdout splits.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from pgtnet.errors import ConfigError, TooFewCases, TraceTooShort
from pgtnet.eventlog.model import Event, EventLog
from pgtnet.utils.utils import derive_seed

logger = logging.getLogger(__name__)

MIN_PREFIX_LENGTH = 2
SPLIT_FORMAT_VERSION = "pgtnet-split/1"


@dataclass(frozen=True)
class EventPrefixRecord:
    """The first ``k`` events of a case plus the time left until its last event."""
    case_id: str
    k: int
    events: Tuple[Event, ...]
    remaining_seconds: float

    def __post_init__(self):
        if self.k < MIN_PREFIX_LENGTH:
            raise TraceTooShort(f"prefix of case {self.case_id!r} has k={self.k} < {MIN_PREFIX_LENGTH}")
        if self.remaining_seconds < 0:
            raise ValueError(f"negative remaining time for case {self.case_id!r}")

    @property
    def last_event(self) -> Event:
        return self.events[-1]


def build_prefixes(log: EventLog) -> List[EventPrefixRecord]:
    """
    Emit the prefixes k = 2 … n−1 of every trace of length n, in log order.

    Raises:
        TraceTooShort: a trace has fewer than 3 events (filter upstream)
    """
    records = []
    for trace in log.traces:
        n = len(trace)
        if n < MIN_PREFIX_LENGTH + 1:
            raise TraceTooShort(f"trace {trace.case_id!r} has {n} events; filter traces shorter than 3 first")
        end = trace.events[-1].seconds
        for k in range(MIN_PREFIX_LENGTH, n):
            records.append(EventPrefixRecord(
                case_id=trace.case_id,
                k=k,
                events=trace.events[:k],
                remaining_seconds=end - trace.events[k - 1].seconds,
            ))
    logger.info("构建前缀: %d 个 trace → %d 个前缀", len(log), len(records))
    return records


class SplitMode(str, Enum):
    CV = "cv"
    HOLDOUT = "holdout"


@dataclass(frozen=True)
class FoldData:
    train: List[EventPrefixRecord]
    validation: List[EventPrefixRecord]
    test: List[EventPrefixRecord]


@dataclass(frozen=True)
class SplitPlan:
    """
    Case-level data split.

    ``assignment`` maps each case id to a fold index. In cv mode fold ``f`` is
    the test set of run ``f``. In holdout mode fold 0 holds the test cases and
    fold 1 the training pool. ``case_order`` keeps log order (cv) or case start
    order (holdout) so validation carving is reproducible.
    """
    mode: SplitMode
    folds: float
    seed: int
    assignment: Dict[str, int]
    validation_fraction: float = 0.2
    case_order: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def num_runs(self) -> int:
        return int(self.folds) if self.mode == SplitMode.CV else 1

    def fold_sizes(self) -> List[int]:
        sizes = [0] * (int(self.folds) if self.mode == SplitMode.CV else 2)
        for fold in self.assignment.values():
            sizes[fold] += 1
        return sizes

    def partition(self, fold: int) -> Tuple[List[str], List[str], List[str]]:
        """
        Case ids of (train, validation, test) for run ``fold``.

        cv: validation is a seeded random ``validation_fraction`` of the
        non-test cases. holdout: validation is the latest-starting fraction of
        the training pool.
        """
        if not 0 <= fold < self.num_runs:
            raise ValueError(f"fold {fold} out of range for a {self.mode.value} plan with {self.num_runs} run(s)")
        test = [c for c in self.case_order if self.assignment[c] == fold]
        rest = [c for c in self.case_order if self.assignment[c] != fold]
        n_val = max(1, int(round(self.validation_fraction * len(rest))))
        if self.mode == SplitMode.CV:
            rng = np.random.default_rng(derive_seed(self.seed, 1, fold))
            order = rng.permutation(len(rest))
            chosen = set(order[:n_val].tolist())
            validation = [c for i, c in enumerate(rest) if i in chosen]
            train = [c for i, c in enumerate(rest) if i not in chosen]
        else:
            train, validation = rest[:len(rest) - n_val], rest[len(rest) - n_val:]
        return train, validation, test

    # ==================== 序列化 ====================

    def to_dict(self) -> dict:
        return {
            "version": SPLIT_FORMAT_VERSION,
            "mode": self.mode.value,
            "folds": self.folds,
            "seed": self.seed,
            "validation_fraction": self.validation_fraction,
            "case_order": list(self.case_order),
            "assignment": dict(sorted(self.assignment.items())),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "SplitPlan":
        if raw.get("version") != SPLIT_FORMAT_VERSION:
            raise ConfigError(f"unsupported split file version {raw.get('version')!r}")
        return cls(
            mode=SplitMode(raw["mode"]),
            folds=raw["folds"],
            seed=int(raw["seed"]),
            assignment={str(k): int(v) for k, v in raw["assignment"].items()},
            validation_fraction=float(raw["validation_fraction"]),
            case_order=tuple(raw["case_order"]),
        )

    def save(self, path, manifest_hash: Optional[str] = None) -> None:
        document = self.to_dict()
        if manifest_hash:
            document["manifest_hash"] = manifest_hash
        Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "SplitPlan":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise ConfigError(f"split file not found: {path}") from e
        return cls.from_dict(raw)


def make_split(
        log: EventLog,
        mode: SplitMode = SplitMode.CV,
        folds: float = 5,
        seed: int = 42,
        validation_fraction: float = 0.2,
) -> SplitPlan:
    """
    划分 case 到 fold

    Args:
        log: 事件日志
        mode: cv（随机 k 折）或 holdout（按 case 开始时间的时间序划分）
        folds: cv 模式下的折数；holdout 模式下训练集比例（如 0.8）
        seed: 随机种子
        validation_fraction: 从训练 case 中划出的验证集比例

    Returns:
        SplitPlan

    Raises:
        TooFewCases: 任一 train/validation/test 集合为空
    """
    mode = SplitMode(mode)
    if not 0 < validation_fraction < 1:
        raise ConfigError(f"validation_fraction must be in (0, 1), got {validation_fraction}")
    case_ids = list(log.case_ids)
    n = len(case_ids)

    if mode == SplitMode.CV:
        folds = int(folds)
        if folds < 2:
            raise ConfigError(f"cv needs at least 2 folds, got {folds}")
        rng = np.random.default_rng(derive_seed(seed, 0))
        permutation = rng.permutation(n)
        assignment = {case_ids[idx]: pos % folds for pos, idx in enumerate(permutation.tolist())}
        order = tuple(case_ids)
    else:
        ratio = float(folds)
        if not 0 < ratio < 1:
            raise ConfigError(f"holdout ratio must be in (0, 1), got {ratio}")
        # stable: equal start times keep log order
        order = tuple(sorted(case_ids, key=lambda c: log.trace(c).start))
        n_train = int(round(ratio * n))
        assignment = {c: (1 if i < n_train else 0) for i, c in enumerate(order)}
        folds = ratio

    plan = SplitPlan(mode, folds, int(seed), assignment, validation_fraction, order)
    for fold in range(plan.num_runs):
        train, validation, test = plan.partition(fold)
        if not train or not validation or not test:
            raise TooFewCases(
                f"{n} cases cannot fill train/validation/test for fold {fold} "
                f"({len(train)}/{len(validation)}/{len(test)})"
            )
    logger.info("数据划分: %s, %d 个 case, fold 大小 %s", mode.value, n, plan.fold_sizes())
    return plan


def materialize_fold(records: Sequence[EventPrefixRecord], plan: SplitPlan, fold: int) -> FoldData:
    """Route every record to train/validation/test by its case's assignment."""
    train_ids, val_ids, test_ids = (set(ids) for ids in plan.partition(fold))
    data = FoldData([], [], [])
    for record in records:
        if record.case_id in train_ids:
            data.train.append(record)
        elif record.case_id in val_ids:
            data.validation.append(record)
        elif record.case_id in test_ids:
            data.test.append(record)
        else:
            raise ValueError(f"case {record.case_id!r} is not covered by the split plan")
    return data
