"""
GSTP 命令行工具
"""
