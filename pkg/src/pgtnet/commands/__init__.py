# src/pgtnet/commands/__init__.py
# CLI 命令模块初始化文件
