"""
DUMMY 基线：按前缀长度预测训练集平均剩余时间
"""

import logging
from typing import Dict, Sequence

import numpy as np
import pandas as pd

from pgtnet.prefixing import EventPrefixRecord

logger = logging.getLogger(__name__)


class DummyRegressor:
    """
    Mean training remaining time per prefix length k.

    An unseen k falls back to the nearest seen k; ties go to the smaller k.
    """

    def __init__(self):
        self.means_by_k: Dict[int, float] = {}
        self._seen = np.zeros(0, dtype=np.int64)

    def fit(self, train_records: Sequence[EventPrefixRecord]) -> "DummyRegressor":
        if not train_records:
            raise ValueError("DummyRegressor needs at least one training record")
        frame = pd.DataFrame({
            "k": [r.k for r in train_records],
            "remaining": [r.remaining_seconds for r in train_records],
        })
        means = frame.groupby("k", sort=True)["remaining"].mean()
        self.means_by_k = {int(k): float(v) for k, v in means.items()}
        self._seen = np.array(sorted(self.means_by_k), dtype=np.int64)
        logger.debug("DUMMY 基线: %d 个前缀长度", len(self.means_by_k))
        return self

    def nearest_k(self, k: int) -> int:
        if not self.means_by_k:
            raise RuntimeError("DummyRegressor is not fitted")
        if k in self.means_by_k:
            return k
        distance = np.abs(self._seen - k)
        # argmin returns the first minimum, i.e. the smaller k on ties
        return int(self._seen[int(np.argmin(distance))])

    def predict_one(self, k: int) -> float:
        return self.means_by_k[self.nearest_k(k)]

    def predict(self, records: Sequence[EventPrefixRecord]) -> np.ndarray:
        return np.array([self.predict_one(r.k) for r in records], dtype=np.float64)


def dummy_predict(train_records: Sequence[EventPrefixRecord], k: int) -> float:
    """Remaining time in seconds the DUMMY baseline predicts for prefix length ``k``."""
    return DummyRegressor().fit(train_records).predict_one(k)
