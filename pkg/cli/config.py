"""
GSTP 命令行配置
所有取值都来自环境变量, 库函数本身不读环境
"""

import logging
import os
from typing import List

from src.core import ConfigError
from src.dnc import DENSE_CAP
from src.exact import EXACT_CAP_CELLS, EXACT_MAX_ESCORTS
from src.reduction import DEFAULT_CAP


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw.replace("_", ""))
    except ValueError:
        raise ConfigError(f"环境变量 {name} 必须是整数: {raw!r}") from None


class GSTPConfig:
    """命令行配置类, 命令入口调用 reload 读取环境变量"""

    # 规模上限
    CAP_CELLS = DEFAULT_CAP  # 归约实例的最大边长 m
    EXACT_CAP_CELLS = EXACT_CAP_CELLS
    EXACT_MAX_ESCORTS = EXACT_MAX_ESCORTS
    DENSE_CAP_CELLS = 4_000_000  # 稠密栅格化的最大格子数
    SOLVER_DENSE_CAP = DENSE_CAP

    # 日志
    LOG_LEVEL = "WARNING"

    # 基准测试
    DEFAULT_JOBS = 1

    VERSION = "1.0.0"
    FORMAT_VERSIONS = {"instance": "gstp 1", "scg": "scg 1"}

    @classmethod
    def reload(cls) -> None:
        """重新读取环境变量; 整数项无法解析时抛出 ConfigError, 已有取值保持不变"""
        values = {
            "CAP_CELLS": _int_env("GSTP_CAP_CELLS", DEFAULT_CAP),
            "EXACT_CAP_CELLS": _int_env("GSTP_EXACT_CAP_CELLS", EXACT_CAP_CELLS),
            "EXACT_MAX_ESCORTS": _int_env("GSTP_EXACT_MAX_ESCORTS", EXACT_MAX_ESCORTS),
            "DENSE_CAP_CELLS": _int_env("GSTP_DENSE_CAP_CELLS", 4_000_000),
            "DEFAULT_JOBS": _int_env("GSTP_BENCH_JOBS", 1),
        }
        for name, value in values.items():
            setattr(cls, name, value)
        cls.LOG_LEVEL = os.getenv("GSTP_LOG_LEVEL", "WARNING").upper()

    @classmethod
    def validate_config(cls) -> List[str]:
        """验证配置并返回错误列表"""
        errors = []
        for name, value in (("GSTP_CAP_CELLS", cls.CAP_CELLS),
                            ("GSTP_EXACT_CAP_CELLS", cls.EXACT_CAP_CELLS),
                            ("GSTP_DENSE_CAP_CELLS", cls.DENSE_CAP_CELLS),
                            ("GSTP_BENCH_JOBS", cls.DEFAULT_JOBS)):
            if value < 1:
                errors.append(f"{name} 必须是正整数: {value}")
        if cls.EXACT_MAX_ESCORTS < 1:
            errors.append(f"GSTP_EXACT_MAX_ESCORTS 必须是正整数: {cls.EXACT_MAX_ESCORTS}")
        if not isinstance(logging.getLevelName(cls.LOG_LEVEL), int):
            errors.append(f"未知的日志级别: {cls.LOG_LEVEL}")
        return errors

    @classmethod
    def get_config_summary(cls) -> dict:
        """获取配置摘要"""
        return {
            "caps": {
                "cap_cells": cls.CAP_CELLS,
                "exact_cap_cells": cls.EXACT_CAP_CELLS,
                "exact_max_escorts": cls.EXACT_MAX_ESCORTS,
                "dense_cap_cells": cls.DENSE_CAP_CELLS,
                "solver_dense_cap": cls.SOLVER_DENSE_CAP,
            },
            "log_level": cls.LOG_LEVEL,
            "bench": {"jobs": cls.DEFAULT_JOBS},
            "version": cls.VERSION,
            "formats": cls.FORMAT_VERSIONS,
        }
