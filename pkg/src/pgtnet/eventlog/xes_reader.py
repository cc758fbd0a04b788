import logging
import xml.etree.ElementTree as ET
from typing import Dict, Optional, Tuple

from pgtnet.errors import MalformedXml, MissingMandatoryAttribute, UnparseableTimestamp
from pgtnet.eventlog.base_reader import BaseLogReader, RawEvent
from pgtnet.eventlog.model import AttributeSchema, EventLog

logger = logging.getLogger(__name__)

ACTIVITY_KEY = "concept:name"
CASE_KEY = "concept:name"
TIMESTAMP_KEY = "time:timestamp"
LIFECYCLE_KEY = "lifecycle:transition"

NUMERIC_TAGS = {"int", "float"}
TEXT_TAGS = {"string", "boolean", "id"}


def _local(tag: str) -> str:
    """Strip the XML namespace prefix: '{http://www.xes-standard.org/}event' -> 'event'."""
    return tag.rsplit("}", 1)[-1]


class XesLogReader(BaseLogReader):
    """
    XES 事件日志读取器（最小子集）

    支持 trace/event 的 string、date、int、float、boolean 子属性；
    不支持 extension 定义与嵌套 list/container。
    """

    def __init__(self, schema: Optional[AttributeSchema] = None):
        super().__init__(schema)

    def read(self, path) -> EventLog:
        try:
            root = ET.parse(path).getroot()
        except ET.ParseError as e:
            raise MalformedXml(f"{path}: {e}") from e

        raw_events = []
        event_index = 0
        for trace_index, trace in enumerate(el for el in root if _local(el.tag) == "trace"):
            trace_attrs, _ = self._attributes(trace)
            case_id = trace_attrs.pop(CASE_KEY, None)
            if case_id is None:
                raise MissingMandatoryAttribute(trace_index, f"trace {CASE_KEY}")

            for event in (el for el in trace if _local(el.tag) == "event"):
                attrs, stamp = self._attributes(event)
                activity = attrs.pop(ACTIVITY_KEY, None)
                if activity is None:
                    raise MissingMandatoryAttribute(event_index, ACTIVITY_KEY)
                if stamp is None:
                    raise MissingMandatoryAttribute(event_index, TIMESTAMP_KEY)
                lifecycle = attrs.pop(LIFECYCLE_KEY, None)
                try:
                    timestamp = self.parse_timestamp(stamp)
                except ValueError as e:
                    raise UnparseableTimestamp(event_index, stamp) from e
                raw_events.append(RawEvent(
                    case_id=str(case_id),
                    activity=str(activity),
                    timestamp=timestamp,
                    lifecycle=str(lifecycle) if lifecycle is not None else None,
                    event_attrs=attrs,
                    case_attrs=dict(trace_attrs),
                ))
                event_index += 1

        logger.debug("解析 XES %s: %d 个事件", path, len(raw_events))
        return self.assemble(raw_events)

    @staticmethod
    def _attributes(element) -> Tuple[Dict[str, object], Optional[str]]:
        """
        Collect typed child attributes of a trace or event element.

        :return: (key → value, raw time:timestamp value or None)
        """
        values: Dict[str, object] = {}
        stamp = None
        for child in element:
            tag = _local(child.tag)
            key = child.get("key")
            value = child.get("value")
            if key is None or value is None:
                continue
            if tag == "date":
                if key == TIMESTAMP_KEY:
                    stamp = value
                else:
                    values[key] = value
            elif tag in NUMERIC_TAGS:
                try:
                    values[key] = float(value)
                except ValueError:
                    values[key] = value
            elif tag in TEXT_TAGS:
                values[key] = value
        return values, stamp
