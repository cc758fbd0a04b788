"""
通用工具函数
"""

import hashlib
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np

SECONDS_PER_DAY = 86400.0
SECONDS_PER_WEEK = 7 * SECONDS_PER_DAY


def setup_logging(level=logging.INFO) -> None:
    """
    ✅ 日志统一走 stderr：
    - stdout 留给 CLI 的机器可读结果行（JSON）
    - 调用方可能已经配置过 logging，所以必须强制覆盖

    Args:
        level: 日志级别
    """
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],  # ✅ 强制 stderr
        force=True,
    )


def safe_float(value, default: Optional[float] = None) -> Optional[float]:
    """
    安全地将值转换为浮点数

    Args:
        value: 待转换的值
        default: 转换失败时的默认值

    Returns:
        浮点数，NaN/inf 与无法解析的值都返回 default
    """
    try:
        result = float(value) if value is not None else default
    except (ValueError, TypeError):
        return default
    if result is None or not math.isfinite(result):
        return default
    return result


def format_number(num: Optional[float], decimal_places: int = 2) -> str:
    """
    格式化数字，添加千位分隔符

    Args:
        num: 数字
        decimal_places: 小数位数

    Returns:
        格式化后的字符串
    """
    if num is None:
        return 'N/A'
    return f'{num:,.{decimal_places}f}'


def format_percentage(num: Optional[float], decimal_places: int = 2) -> str:
    """
    格式化百分比

    Args:
        num: 数字（如 0.05 表示 5%）
        decimal_places: 小数位数

    Returns:
        格式化后的百分比字符串
    """
    if num is None:
        return 'N/A'
    return f'{num * 100:.{decimal_places}f}%'


def seconds_to_days(seconds: float) -> float:
    return seconds / SECONDS_PER_DAY


def derive_seed(master_seed: int, *counters: int) -> int:
    """
    Derive an independent 32-bit seed from a master seed and integer counters.

    Used for every random stream in a run (shuffling, dropout masks,
    initialization) so a single master seed replays the whole run.
    """
    entropy = [int(master_seed) & 0xFFFFFFFF, *(int(c) & 0xFFFFFFFF for c in counters)]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def canonical_json(obj: Any) -> str:
    """Serialize with sorted keys and no whitespace, for hashing and stable files."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def ensure_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out
