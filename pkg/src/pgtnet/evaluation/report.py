"""
report.json 读写与 Markdown 汇总
"""

import json
import logging
from pathlib import Path
from typing import Optional

from pgtnet.errors import SchemaVersionMismatch
from pgtnet.evaluation.crossval import CrossValidationResult
from pgtnet.evaluation.earliness import earliness_cutoff
from pgtnet.evaluation.metrics import Aggregate, EvaluationReport
from pgtnet.utils.markdown_formatter import format_list_to_markdown_table, format_mapping_to_markdown_list
from pgtnet.utils.utils import format_number, format_percentage

logger = logging.getLogger(__name__)

REPORT_VERSION = "pgtnet-report/1"


def write_report(result: CrossValidationResult, path, manifest_hash: Optional[str] = None,
                 split_mode: Optional[str] = None) -> Path:
    path = Path(path)
    document = {"schema_version": REPORT_VERSION, **result.to_dict()}
    if split_mode:
        document["split"] = split_mode
    if manifest_hash:
        document["manifest_hash"] = manifest_hash
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("写出评估报告 %s", path)
    return path


def read_report(path) -> CrossValidationResult:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    if document.get("schema_version") != REPORT_VERSION:
        raise SchemaVersionMismatch(f"{path}: expected {REPORT_VERSION!r}, found {document.get('schema_version')!r}")
    return CrossValidationResult(
        reports={name: EvaluationReport.from_dict(r) for name, r in document["reports"].items()},
        aggregates={name: Aggregate(a["mean"], a["std"], a["runs"]) for name, a in document["aggregates"].items()},
    )


def summary_markdown(result: CrossValidationResult) -> str:
    """
    生成 Markdown 汇总

    Returns:
        每种方法的 MAE ± std、相对 MAE，以及按前缀长度的 MAE 表
    """
    sections = []
    for name in sorted(result.reports):
        report = result.reports[name]
        agg = result.aggregates[name]
        sections.append(format_mapping_to_markdown_list(f"## {name}", {
            "MAE (天)": f"{format_number(agg.mean, 4)} ± {format_number(agg.std, 4)} ({agg.runs} 次运行)",
            "相对 MAE": format_percentage(report.relative_mae),
            "测试前缀数": report.num_records,
        }))

    names = sorted(result.reports)
    first = result.reports[names[0]]
    cutoff = earliness_cutoff(first.per_prefix_length)
    rows = []
    for k in sorted(first.per_prefix_length):
        row = {"k": k, "数量": first.per_prefix_length[k].count}
        for name in names:
            bucket = result.reports[name].per_prefix_length.get(k)
            row[f"{name} MAE"] = format_number(bucket.mae_days, 3) if bucket else "N/A"
        row["90% 截止"] = "✅" if k == cutoff else ""
        rows.append(row)
    sections.append("## 按前缀长度的 MAE\n\n" + format_list_to_markdown_table(rows) + "\n")
    return "\n".join(sections)
