"""
共享测试夹具：小型事件日志、合成日志与小模型配置
"""

from datetime import datetime, timedelta, timezone

import pytest

from pgtnet.eventlog.model import (
    AttributeKind,
    AttributeSchema,
    AttributeScope,
    AttributeSpec,
    Event,
    EventLog,
    Trace,
)
from pgtnet.model.config import PGTNetConfig
from pgtnet.synthetic import SyntheticConfig, generate_synthetic_log
from pgtnet.training.config import TrainConfig

T0 = datetime(2024, 1, 1, 8, 0, tzinfo=timezone.utc)

AMOUNT_SCHEMA = AttributeSchema(attributes={
    "amount": AttributeSpec(AttributeKind.NUMERIC, AttributeScope.CASE),
    "channel": AttributeSpec(AttributeKind.CATEGORICAL, AttributeScope.CASE),
})

TINY_CSV = """case_id,activity,timestamp,lifecycle,amount
c1,Register,2024-01-01T08:00:00Z,complete,100
c1,Check,2024-01-01T10:00:00Z,complete,100
c1,Close,2024-01-02T08:00:00Z,complete,100
c2,Register,2024-01-01T09:00:00Z,complete,300
c2,Check,2024-01-01T12:00:00Z,complete,300
c2,Check,2024-01-01T15:00:00Z,complete,300
c2,Close,2024-01-03T09:00:00Z,complete,300
"""


def build_trace(case_id, activities, hours, start=T0, attrs=None, lifecycle=None):
    """``hours[i]`` is the offset of event i from ``start``."""
    events = tuple(
        Event(activity, case_id, start + timedelta(hours=h), lifecycle, dict(attrs or {}))
        for activity, h in zip(activities, hours)
    )
    return Trace(case_id, events)


@pytest.fixture
def make_trace():
    return build_trace


@pytest.fixture
def make_log():
    def _make(traces, schema=None):
        return EventLog(tuple(traces), schema or AttributeSchema())
    return _make


@pytest.fixture
def tiny_csv(tmp_path):
    path = tmp_path / "tiny.csv"
    path.write_text(TINY_CSV, encoding="utf-8")
    return path


@pytest.fixture
def synthetic_log():
    return generate_synthetic_log(SyntheticConfig(cases=30, seed=7))


@pytest.fixture
def jittered_log():
    return generate_synthetic_log(SyntheticConfig(cases=50, seed=11, jitter=0.3))


@pytest.fixture
def tiny_model_config():
    return PGTNetConfig(
        hidden_dim=8, num_layers=2, num_heads=2, d_pe=3, d_se=4,
        mpnn_dropout=0.0, attn_dropout=0.0, seed=3,
    )


@pytest.fixture
def tiny_train_config():
    return TrainConfig(epochs=6, warmup_epochs=2, base_lr=5e-3, weight_decay=0.0, batch_size=4, seed=5)
