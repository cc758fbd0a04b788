"""
Markdown格式化工具
src/pgtnet/utils/markdown_formatter.py
把统计结果与误差表格式化为 Markdown，供 CLI 汇总输出
"""


def format_list_to_markdown_table(data_list):
    """
    将列表数据格式化为Markdown表格

    Args:
        data_list: 已经格式化好的字典列表

    Returns:
        str: Markdown格式的表格字符串
    """
    if not data_list:
        return ""

    columns = list(data_list[0].keys())
    if not columns:
        return ""

    header = "| " + " | ".join(columns) + " |"
    separator = "| " + " | ".join(["---"] * len(columns)) + " |"

    rows = []
    for item in data_list:
        row_data = [str(item.get(col, "")) for col in columns]
        rows.append("| " + " | ".join(row_data) + " |")

    return "\n".join([header, separator] + rows)


def format_mapping_to_markdown_list(title, mapping):
    """
    将键值对格式化为 Markdown 列表

    Args:
        title: 标题
        mapping: 键值对

    Returns:
        str: 以 title 开头的 Markdown 列表
    """
    result = f"{title}\n\n"
    for key, value in mapping.items():
        result += f"- {key}: {value}\n"
    return result
