import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from datetime import datetime
from typing import Dict, List, Optional

from dateutil import parser as date_parser

from pgtnet.errors import EmptyLog, InvalidEvent
from pgtnet.eventlog.model import (
    AttributeKind,
    AttributeSchema,
    AttributeScope,
    AttributeSpec,
    Event,
    EventLog,
    Trace,
    utc,
)
from pgtnet.utils.utils import safe_float

logger = logging.getLogger(__name__)


@dataclass
class RawEvent:
    """One source row/element before kinds are resolved."""
    case_id: str
    activity: str
    timestamp: datetime
    lifecycle: Optional[str]
    event_attrs: Dict[str, object] = field(default_factory=dict)
    case_attrs: Dict[str, object] = field(default_factory=dict)


class BaseLogReader(ABC):
    """
    事件日志读取器基类

    提供通用功能：
    - 时间戳解析（统一转换为 UTC）
    - 属性类型推断（numeric / categorical）与作用域推断（case / event）
    - 按 case 分组并稳定排序，组装 EventLog
    """

    def __init__(self, schema: Optional[AttributeSchema] = None):
        self.schema = schema or AttributeSchema()

    @abstractmethod
    def read(self, path) -> EventLog:
        """
        读取事件日志

        Args:
            path: 日志文件路径

        Returns:
            满足 Trace 不变式的 EventLog
        """

    # ==================== 通用工具方法 ====================

    @staticmethod
    def parse_timestamp(value: str, fmt: Optional[str] = None) -> datetime:
        """
        解析时间戳，naive 时间视为 UTC

        :param value: 时间戳字符串
        :param fmt: strptime 格式；为空时按 ISO-8601 解析
        :return: UTC datetime
        :raises ValueError: 无法解析时
        """
        text = str(value).strip()
        if not text:
            raise ValueError("empty timestamp")
        if fmt:
            return utc(datetime.strptime(text, fmt))
        try:
            return utc(date_parser.isoparse(text))
        except (ValueError, OverflowError):
            # Loosely formatted values such as "2012/10/09 14:50:17"
            try:
                return utc(date_parser.parse(text))
            except (ValueError, OverflowError) as e:
                raise ValueError(str(e)) from e

    def resolve_schema(self, raw_events: List[RawEvent]) -> AttributeSchema:
        """
        Complete the declared schema with every attribute seen in ``raw_events``.

        Undeclared kinds: numeric when every non-empty value parses as a number.
        Undeclared scopes: case-level when the reader reported the attribute at
        trace level or its value is constant within every case.
        """
        declared = dict(self.schema.attributes)
        values: Dict[str, list] = {}
        per_case: Dict[str, Dict[str, set]] = {}
        trace_level: set = set()

        for raw in raw_events:
            for name, value in raw.case_attrs.items():
                trace_level.add(name)
                values.setdefault(name, []).append(value)
            for name, value in raw.event_attrs.items():
                values.setdefault(name, []).append(value)
                per_case.setdefault(name, {}).setdefault(raw.case_id, set()).add(str(value))

        resolved = {}
        for name in sorted(values):
            if name in declared:
                resolved[name] = declared[name]
                continue
            kind = AttributeKind.NUMERIC if all(
                isinstance(v, float) or safe_float(v) is not None for v in values[name]
            ) else AttributeKind.CATEGORICAL
            constant = all(len(seen) == 1 for seen in per_case.get(name, {}).values())
            scope = AttributeScope.CASE if name in trace_level or constant else AttributeScope.EVENT
            resolved[name] = AttributeSpec(kind, scope)
            logger.debug("推断属性 %s: %s / %s", name, kind.value, scope.value)
        # declared-but-unseen attributes stay declared
        for name, spec in declared.items():
            resolved.setdefault(name, spec)
        return self.schema.with_attributes(resolved)

    @staticmethod
    def coerce(value, spec: AttributeSpec, name: str = "", case_id: str = ""):
        """
        按属性类型转换取值

        :param value: 原始取值
        :param spec: 属性声明
        :param name: 属性名（日志用）
        :param case_id: 所属 case（日志用）
        :return: 数值属性返回 float，无法解析时返回 None；其余返回 str
        """
        if spec.kind == AttributeKind.NUMERIC:
            number = value if isinstance(value, float) else safe_float(value)
            if number is None:
                logger.warning("⚠️ case %s: 数值属性 %s 的取值 %r 无法解析，已忽略", case_id, name, value)
            return number
        return str(value)

    def assemble(self, raw_events: List[RawEvent]) -> EventLog:
        """
        Group raw events by case (first-appearance order) and stably sort each
        case by timestamp, keeping source order for ties.
        """
        if not raw_events:
            raise EmptyLog("event log contains no events")
        schema = self.resolve_schema(raw_events)

        grouped: Dict[str, List[RawEvent]] = {}
        for raw in raw_events:
            grouped.setdefault(raw.case_id, []).append(raw)

        traces = []
        for case_id, rows in grouped.items():
            rows = sorted(rows, key=lambda r: r.timestamp)  # sorted() is stable
            events = []
            for raw in rows:
                attrs = {}
                for name, value in {**raw.case_attrs, **raw.event_attrs}.items():
                    coerced = self.coerce(value, schema.attributes[name], name, case_id)
                    if coerced is not None:
                        attrs[name] = coerced
                try:
                    events.append(Event(
                        activity=raw.activity,
                        case_id=case_id,
                        timestamp=raw.timestamp,
                        lifecycle=raw.lifecycle or None,
                        attrs=attrs,
                    ))
                except ValueError as e:
                    raise InvalidEvent(f"case {case_id!r}: {e}") from e
            traces.append(Trace(case_id, tuple(events)))

        log = EventLog(tuple(traces), schema)
        logger.info("✅ 读取事件日志: %d 个 case, %d 个事件", len(log), log.num_events)
        return log
