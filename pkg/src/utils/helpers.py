"""
辅助函数模块
基准测试记录用到的时间过滤与错误列文本
"""

import datetime
from typing import Any, Dict, List, Optional

from dateutil.parser import parse as parse_date

from ..core.errors import FormatError

ERROR_CELL_LIMIT = 200


def error_cell(error: BaseException, max_length: int = ERROR_CELL_LIMIT) -> str:
    """把异常压成 CSV 错误列的一行文本: 类名加消息, 空白折叠, 过长截断"""
    message = " ".join(str(error).split())
    text = f"{type(error).__name__}: {message}" if message else type(error).__name__
    if len(text) <= max_length:
        return text
    return text[:max_length] + "..."


def parse_since(value: Optional[str]) -> Optional[datetime.datetime]:
    """解析 --since 参数, 支持任意 ISO 风格时间"""
    if not value:
        return None
    try:
        return parse_date(value)
    except (ValueError, OverflowError) as e:
        raise FormatError(f"无法解析 --since 时间 {value!r}: {e}") from e


def records_since(rows: List[Dict[str, Any]], since: Optional[datetime.datetime]) -> List[Dict[str, Any]]:
    """保留 started_at 不早于 since 的记录; 时间戳无法解析的记录视为过期"""
    if since is None:
        return list(rows)
    since = since.replace(tzinfo=None)
    kept = []
    for row in rows:
        try:
            started = parse_date(row.get("started_at", ""))
        except (ValueError, OverflowError):
            continue
        if started.replace(tzinfo=None) >= since:
            kept.append(row)
    return kept
