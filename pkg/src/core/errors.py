"""
异常层次
所有模块抛出的错误都派生自 GSTPError, 命令行据此映射退出码
"""

from typing import Optional


class GSTPError(Exception):
    """工具包的基础异常"""


class BoardError(GSTPError):
    """棋盘构造或坐标越界"""


class IllegalMoveError(GSTPError):
    """非法的线移动或沙堡回合"""


class IncompatibleInstanceError(GSTPError):
    """起点与目标的颜色直方图不一致"""


class CapExceededError(GSTPError):
    """超出资源上限"""


class PlanningError(GSTPError):
    """求解器无法给出计划"""


class UnsupportedError(GSTPError):
    """超出范围的请求, 例如 PGSP 排序"""


class FormatError(GSTPError):
    """文本格式解析错误, 附带行号"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"第 {line} 行: {message}"
        super().__init__(message)


class ConfigError(GSTPError):
    """环境变量配置无法解析"""
