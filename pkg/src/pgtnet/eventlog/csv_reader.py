import logging
from typing import Optional

import pandas as pd

from pgtnet.errors import EmptyLog, MissingColumn, UnparseableTimestamp
from pgtnet.eventlog.base_reader import BaseLogReader, RawEvent
from pgtnet.eventlog.model import AttributeSchema, ColumnMapping, EventLog

logger = logging.getLogger(__name__)


class CsvLogReader(BaseLogReader):
    """
    CSV 事件日志读取器

    使用示例：
        reader = CsvLogReader(AttributeSchema.load("schema.json"))
        log = reader.read("helpdesk.csv")
    """

    def __init__(self, schema: Optional[AttributeSchema] = None, columns: Optional[ColumnMapping] = None):
        super().__init__(schema)
        self.columns = columns or self.schema.columns

    def read(self, path) -> EventLog:
        cols = self.columns
        try:
            df = pd.read_csv(
                path,
                sep=cols.delimiter,
                dtype=str,
                keep_default_na=False,
                skipinitialspace=True,
            )
        except pd.errors.EmptyDataError as e:
            raise EmptyLog(f"{path}: no rows") from e

        for required in (cols.case_id, cols.activity, cols.timestamp):
            if required not in df.columns:
                raise MissingColumn(f"{path}: column {required!r} not found (have {list(df.columns)})")
        if df.empty:
            raise EmptyLog(f"{path}: no rows")

        lifecycle_col = cols.lifecycle if cols.lifecycle in df.columns else None
        attribute_cols = [c for c in df.columns if c not in cols.reserved]

        raw_events = []
        for row_number, row in enumerate(df.itertuples(index=False), start=1):
            values = dict(zip(df.columns, row))
            stamp = values[cols.timestamp]
            try:
                timestamp = self.parse_timestamp(stamp, cols.timestamp_format)
            except ValueError as e:
                raise UnparseableTimestamp(row_number, stamp) from e
            raw_events.append(RawEvent(
                case_id=values[cols.case_id].strip(),
                activity=values[cols.activity].strip(),
                timestamp=timestamp,
                lifecycle=(values[lifecycle_col].strip() or None) if lifecycle_col else None,
                event_attrs={c: values[c] for c in attribute_cols if values[c] != ""},
            ))

        logger.debug("解析 CSV %s: %d 行, 属性列 %s", path, len(raw_events), attribute_cols)
        return self.assemble(raw_events)
