"""
事件日志数据模型

Event, Trace and EventLog are immutable once built. Attribute kinds and scopes
live in an AttributeSchema that travels with the log.
"""

import functools
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union

from pgtnet.errors import ConfigError

AttributeValue = Union[str, float]


class AttributeKind(str, Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


class AttributeScope(str, Enum):
    CASE = "case"
    EVENT = "event"


@dataclass(frozen=True)
class AttributeSpec:
    kind: AttributeKind
    scope: AttributeScope


@dataclass(frozen=True)
class ColumnMapping:
    """CSV column names and parsing options."""
    case_id: str = "case_id"
    activity: str = "activity"
    timestamp: str = "timestamp"
    lifecycle: Optional[str] = "lifecycle"
    delimiter: str = ","
    timestamp_format: Optional[str] = None

    @property
    def reserved(self) -> Tuple[str, ...]:
        names = (self.case_id, self.activity, self.timestamp, self.lifecycle)
        return tuple(n for n in names if n)


@dataclass(frozen=True)
class AttributeSchema:
    """
    Declared attribute kinds/scopes plus the CSV column mapping.

    Attributes absent from ``attributes`` are inferred by the readers.
    """
    attributes: Mapping[str, AttributeSpec] = field(default_factory=dict)
    columns: ColumnMapping = field(default_factory=ColumnMapping)

    def names(self, kind: Optional[AttributeKind] = None,
              scope: Optional[AttributeScope] = None) -> Tuple[str, ...]:
        """Attribute names sorted, optionally filtered by kind and scope."""
        return tuple(sorted(
            name for name, spec in self.attributes.items()
            if (kind is None or spec.kind == kind) and (scope is None or spec.scope == scope)
        ))

    def with_attributes(self, attributes: Mapping[str, AttributeSpec]) -> "AttributeSchema":
        return AttributeSchema(attributes=dict(attributes), columns=self.columns)

    def to_dict(self) -> dict:
        cols = self.columns
        return {
            "attributes": {
                name: {"kind": spec.kind.value, "scope": spec.scope.value}
                for name, spec in sorted(self.attributes.items())
            },
            "columns": {
                "case_id": cols.case_id,
                "activity": cols.activity,
                "timestamp": cols.timestamp,
                "lifecycle": cols.lifecycle,
            },
            "delimiter": cols.delimiter,
            "timestamp_format": cols.timestamp_format,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "AttributeSchema":
        try:
            attributes = {
                name: AttributeSpec(AttributeKind(spec["kind"]), AttributeScope(spec.get("scope", "event")))
                for name, spec in (raw.get("attributes") or {}).items()
            }
        except (KeyError, ValueError, TypeError) as e:
            raise ConfigError(f"invalid attribute schema: {e}") from e
        cols = raw.get("columns") or {}
        columns = ColumnMapping(
            case_id=cols.get("case_id", "case_id"),
            activity=cols.get("activity", "activity"),
            timestamp=cols.get("timestamp", "timestamp"),
            lifecycle=cols.get("lifecycle", "lifecycle"),
            delimiter=raw.get("delimiter", ","),
            timestamp_format=raw.get("timestamp_format"),
        )
        return cls(attributes=attributes, columns=columns)

    @classmethod
    def load(cls, path) -> "AttributeSchema":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise ConfigError(f"schema file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"schema file is not valid JSON: {path}: {e}") from e
        return cls.from_dict(raw)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


@functools.total_ordering
@dataclass(frozen=True)
class EventClass:
    """
    An (activity, lifecycle) pair labelling an event; graph nodes are event classes.

    Ordering is lexicographic on (activity, lifecycle) with a missing lifecycle
    sorting first.
    """
    activity: str
    lifecycle: Optional[str] = None

    def sort_key(self) -> Tuple[str, int, str]:
        return (self.activity, 0 if self.lifecycle is None else 1, self.lifecycle or "")

    def __lt__(self, other: "EventClass") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return self.activity if self.lifecycle is None else f"{self.activity}|{self.lifecycle}"

    def to_list(self) -> list:
        return [self.activity, self.lifecycle]

    @classmethod
    def from_list(cls, raw) -> "EventClass":
        return cls(raw[0], raw[1])


@dataclass(frozen=True)
class Event:
    activity: str
    case_id: str
    timestamp: datetime
    lifecycle: Optional[str] = None
    attrs: Mapping[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self):
        if not self.activity:
            raise ValueError("event activity must be non-empty")
        if not self.case_id:
            raise ValueError("event case id must be non-empty")
        if self.timestamp.tzinfo is None:
            raise ValueError("event timestamp must be timezone-aware (UTC)")

    @property
    def seconds(self) -> float:
        """POSIX seconds of the timestamp."""
        return self.timestamp.timestamp()

    @property
    def event_class(self) -> EventClass:
        return event_class_of(self)


def event_class_of(event: Event) -> EventClass:
    """Pair an event's activity with its lifecycle transition (None when absent)."""
    return EventClass(event.activity, event.lifecycle or None)


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: Tuple[Event, ...]

    def __post_init__(self):
        if not self.events:
            raise ValueError(f"trace {self.case_id!r} has no events")
        previous = None
        for event in self.events:
            if event.case_id != self.case_id:
                raise ValueError(f"trace {self.case_id!r} holds an event of case {event.case_id!r}")
            if previous is not None and event.timestamp < previous:
                raise ValueError(f"trace {self.case_id!r} timestamps decrease")
            previous = event.timestamp

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    @property
    def start(self) -> datetime:
        return self.events[0].timestamp

    @property
    def end(self) -> datetime:
        return self.events[-1].timestamp

    @property
    def duration_seconds(self) -> float:
        return self.events[-1].seconds - self.events[0].seconds

    @property
    def variant(self) -> Tuple[EventClass, ...]:
        return tuple(event_class_of(e) for e in self.events)


@dataclass(frozen=True)
class EventLog:
    traces: Tuple[Trace, ...]
    schema: AttributeSchema = field(default_factory=AttributeSchema)

    def __post_init__(self):
        index: Dict[str, Trace] = {}
        for trace in self.traces:
            if trace.case_id in index:
                raise ValueError(f"duplicate case id {trace.case_id!r}")
            index[trace.case_id] = trace
            for event in trace.events:
                for name in event.attrs:
                    if name not in self.schema.attributes:
                        raise ValueError(f"attribute {name!r} is not declared in the schema")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self.traces)

    @property
    def case_ids(self) -> Tuple[str, ...]:
        return tuple(t.case_id for t in self.traces)

    @property
    def num_events(self) -> int:
        return sum(len(t) for t in self.traces)

    def trace(self, case_id: str) -> Trace:
        return self._index[case_id]

    def case_attributes(self, case_id: str) -> Dict[str, AttributeValue]:
        """Case-level attribute values of a case (taken from its first event)."""
        case_names = set(self.schema.names(scope=AttributeScope.CASE))
        first = self._index[case_id].events[0]
        return {k: v for k, v in first.attrs.items() if k in case_names}

    def subset(self, case_ids) -> "EventLog":
        """The traces whose case id is in ``case_ids``, in log order."""
        wanted = set(case_ids)
        return EventLog(tuple(t for t in self.traces if t.case_id in wanted), self.schema)

    @property
    def average_case_duration_seconds(self) -> float:
        if not self.traces:
            return 0.0
        return sum(t.duration_seconds for t in self.traces) / len(self.traces)


def utc(dt: datetime) -> datetime:
    """Attach UTC to naive instants, convert aware ones."""
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)
