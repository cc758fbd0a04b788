"""
事件日志读取

按格式选择读取器（csv / xes），默认按文件扩展名推断。
"""

import logging
from pathlib import Path
from typing import Optional

from pgtnet.errors import ConfigError
from pgtnet.eventlog.base_reader import BaseLogReader
from pgtnet.eventlog.csv_reader import CsvLogReader
from pgtnet.eventlog.model import AttributeSchema, EventLog
from pgtnet.eventlog.xes_reader import XesLogReader

logger = logging.getLogger(__name__)

READERS = {
    "csv": CsvLogReader,
    "xes": XesLogReader,
}


def open_reader(fmt: str, schema: Optional[AttributeSchema] = None) -> BaseLogReader:
    try:
        reader_cls = READERS[fmt.lower()]
    except KeyError as e:
        raise ConfigError(f"unsupported log format {fmt!r} (expected one of {sorted(READERS)})") from e
    return reader_cls(schema)


def load_event_log(path, fmt: Optional[str] = None, schema: Optional[AttributeSchema] = None) -> EventLog:
    """
    读取事件日志

    Args:
        path: 日志文件路径
        fmt: "csv" 或 "xes"；为空时按扩展名推断
        schema: 属性 schema（含 CSV 列映射）

    Returns:
        EventLog
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"event log not found: {path}")
    if fmt is None:
        fmt = "xes" if path.suffix.lower() == ".xes" else "csv"
    logger.info("读取事件日志 %s (%s)", path, fmt)
    return open_reader(fmt, schema).read(path)


def parse_csv(path, schema: Optional[AttributeSchema] = None) -> EventLog:
    return CsvLogReader(schema).read(path)


def parse_xes(path, schema: Optional[AttributeSchema] = None) -> EventLog:
    return XesLogReader(schema).read(path)
