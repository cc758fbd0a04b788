"""
合成事件日志

A two-variant process. The second activity reveals the variant, and the
variant fixes every remaining step duration, so the remaining time of any
prefix of length ≥ 2 is a deterministic function of its variant and length
(up to the optional jitter).
"""

import logging
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Tuple

import numpy as np

from pgtnet.errors import ConfigError
from pgtnet.eventlog.model import (
    AttributeKind,
    AttributeSchema,
    AttributeScope,
    AttributeSpec,
    Event,
    EventLog,
    Trace,
)

logger = logging.getLogger(__name__)

FAST_VARIANT: Tuple[str, ...] = ("Register", "Check-Fast", "Approve", "Close")
SLOW_VARIANT: Tuple[str, ...] = ("Register", "Check-Slow", "Review", "Approve", "Close")
CHANNELS: Tuple[str, ...] = ("email", "phone", "web")
LOG_START = datetime(2024, 1, 1, 8, 0, tzinfo=timezone.utc)  # a Monday

SYNTHETIC_SCHEMA = AttributeSchema(attributes={
    "amount": AttributeSpec(AttributeKind.NUMERIC, AttributeScope.CASE),
    "channel": AttributeSpec(AttributeKind.CATEGORICAL, AttributeScope.CASE),
})


@dataclass(frozen=True)
class SyntheticConfig:
    """
    Args:
        cases: case 数量
        seed: 随机种子
        fast_step_hours: 快速变体每步耗时（小时）
        slow_step_hours: 慢速变体每步耗时（小时）
        slow_fraction: 慢速变体所占比例
        arrival_hours: 平均到达间隔（小时，指数分布）
        jitter: 每步耗时的相对均匀扰动，0 表示无扰动
        short_traces: 额外生成的只有 2 个事件的 case 数量（用于过滤测试）
    """
    cases: int = 30
    seed: int = 7
    fast_step_hours: float = 2.0
    slow_step_hours: float = 24.0
    slow_fraction: float = 0.5
    arrival_hours: float = 6.0
    jitter: float = 0.0
    short_traces: int = 0

    def __post_init__(self):
        if self.cases < 0 or self.short_traces < 0 or self.cases + self.short_traces == 0:
            raise ConfigError("synthetic log needs at least one case")
        if self.fast_step_hours <= 0 or self.slow_step_hours <= 0 or self.arrival_hours <= 0:
            raise ConfigError("step and arrival hours must be positive")
        if not 0.0 <= self.slow_fraction <= 1.0 or not 0.0 <= self.jitter < 1.0:
            raise ConfigError("slow_fraction must be in [0, 1] and jitter in [0, 1)")


def generate_synthetic_log(config: SyntheticConfig = SyntheticConfig()) -> EventLog:
    """
    生成两变体合成日志

    Returns:
        EventLog，case id 为 "case-0001" 形式，按到达顺序排列
    """
    rng = np.random.default_rng(config.seed)
    total = config.cases + config.short_traces
    # choose which case positions are truncated without disturbing the others' draws
    short_positions = set(rng.choice(total, size=config.short_traces, replace=False).tolist())
    arrivals = np.cumsum(rng.exponential(config.arrival_hours, size=total))

    traces = []
    for position in range(total):
        case_id = f"case-{position + 1:04d}"
        slow = bool(rng.random() < config.slow_fraction)
        activities = SLOW_VARIANT if slow else FAST_VARIANT
        step_hours = config.slow_step_hours if slow else config.fast_step_hours
        if position in short_positions:
            activities = activities[:2]
        attrs = {
            "amount": float(np.round(rng.uniform(100.0, 5000.0), 2)),
            "channel": str(CHANNELS[int(rng.integers(len(CHANNELS)))]),
        }

        timestamp = LOG_START + timedelta(hours=float(arrivals[position]))
        events = []
        for step, activity in enumerate(activities):
            if step:
                factor = 1.0 + (rng.uniform(-config.jitter, config.jitter) if config.jitter else 0.0)
                timestamp = timestamp + timedelta(hours=step_hours * factor)
            events.append(Event(activity, case_id, timestamp.replace(microsecond=0), "complete", dict(attrs)))
        traces.append(Trace(case_id, tuple(events)))

    log = EventLog(tuple(traces), SYNTHETIC_SCHEMA)
    logger.info("✅ 生成合成日志: %d 个 case (%d 个短 trace)", len(log), config.short_traces)
    return log
