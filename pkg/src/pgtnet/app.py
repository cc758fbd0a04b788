"""
pgtnet 命令行入口
"""

import argparse
import json
import logging
import math
import os
import sys
from typing import List, Optional

from pgtnet import __version__
from pgtnet.errors import EXIT_DATA, EXIT_USAGE, PgtnetError
from pgtnet.utils.utils import setup_logging

from pgtnet.commands.data import register_data_commands
from pgtnet.commands.training import register_training_commands
from pgtnet.commands.evaluation import register_evaluation_commands

logger = logging.getLogger(__name__)


class UsageError(Exception):
    """argparse 用法错误（退出码 1）"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_app() -> argparse.ArgumentParser:
    """
    构建命令行解析器（只做“创建 + 注册命令”）
    """
    parser = _Parser(
        prog="pgtnet",
        description="📊 事件日志 → 前缀图 → GPS 图 Transformer 的剩余时间预测工具",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="DEBUG 级别日志")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    # ✅ 注册所有命令
    register_data_commands(subparsers)
    register_training_commands(subparsers)
    register_evaluation_commands(subparsers)

    return parser


def _jsonable(value):
    """NaN/inf → None，保证 stdout 上是严格 JSON"""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit(payload: dict) -> None:
    print(json.dumps(_jsonable(payload), sort_keys=True), flush=True)


def main(argv: Optional[List[str]] = None) -> int:
    """
    程序主入口：
    1) 配日志
    2) 解析参数
    3) 分发到命令处理函数
    4) stdout 输出一行 JSON 结果，返回退出码（0 成功，1 用法/配置，2 数据，3 数值发散）
    """
    # ✅ 环境变量控制日志级别，方便排障
    log_level = os.getenv("LOG_LEVEL", "INFO").upper()
    setup_logging(level=getattr(logging, log_level, logging.INFO))

    try:
        args = build_app().parse_args(argv)
    except UsageError as e:
        _emit({"error": "UsageError", "message": str(e)})
        return EXIT_USAGE
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        logger.info("🚀 执行命令 %s", args.command)
        result = args.handler(args)
    except KeyboardInterrupt:
        logger.info("🛑 命令被中断")
        _emit({"error": "KeyboardInterrupt", "message": "interrupted"})
        return 130
    except PgtnetError as e:
        logger.error("💥 %s: %s", type(e).__name__, e)
        _emit({"error": type(e).__name__, "message": str(e)})
        return e.exit_code
    except OSError as e:
        logger.error("💥 文件读写失败: %s", e)
        _emit({"error": type(e).__name__, "message": str(e)})
        return EXIT_DATA
    except Exception as e:
        logger.exception("💥 命令运行出错")
        _emit({"error": type(e).__name__, "message": str(e)})
        return EXIT_DATA

    logger.info("✅ 命令 %s 完成", args.command)
    _emit({"status": "ok", "command": args.command, **(result or {})})
    return 0


if __name__ == "__main__":
    sys.exit(main())
