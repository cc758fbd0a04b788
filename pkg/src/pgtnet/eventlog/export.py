"""
Canonical CSV export: case_id, activity, timestamp (ISO-8601 UTC), lifecycle,
then attributes sorted by name.
"""

import pandas as pd

from pgtnet.eventlog.model import AttributeSchema, ColumnMapping, EventLog

CANONICAL_COLUMNS = ColumnMapping()


def to_frame(log: EventLog) -> pd.DataFrame:
    attribute_names = sorted(log.schema.attributes)
    rows = []
    for trace in log.traces:
        for event in trace.events:
            row = {
                "case_id": event.case_id,
                "activity": event.activity,
                "timestamp": event.timestamp.isoformat(),
                "lifecycle": event.lifecycle or "",
            }
            for name in attribute_names:
                value = event.attrs.get(name, "")
                row[name] = repr(value) if isinstance(value, float) else value
            rows.append(row)
    return pd.DataFrame(rows, columns=["case_id", "activity", "timestamp", "lifecycle", *attribute_names])


def canonical_schema(log: EventLog) -> AttributeSchema:
    """The log's attribute schema paired with the canonical column mapping."""
    return AttributeSchema(attributes=dict(log.schema.attributes), columns=CANONICAL_COLUMNS)


def write_canonical_csv(log: EventLog, path) -> None:
    to_frame(log).to_csv(path, index=False, lineterminator="\n")
