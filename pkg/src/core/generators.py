"""
随机实例生成
"""

import logging
from typing import Optional, Sequence

import numpy as np

from .board import DenseBoard
from .errors import BoardError

logger = logging.getLogger(__name__)


def random_board(m1: int, m2: int, counts: Sequence[int], p: int, seed: int) -> DenseBoard:
    """均匀随机放置: counts[i] 为颜色 i+1 的瓦片数, p 为护送格数

    相同参数与种子总是得到相同的棋盘
    """
    if p < 1:
        raise BoardError("护送格数 p 必须至少为 1")
    if any(c < 0 for c in counts):
        raise BoardError("颜色数量不能为负")
    if sum(counts) + p != m1 * m2:
        raise BoardError(f"颜色数量之和 {sum(counts)} 加护送格数 {p} 不等于格子数 {m1 * m2}")
    values = np.repeat(np.arange(0, len(counts) + 1, dtype=np.int8), [p, *counts])
    rng = np.random.default_rng(seed)
    rng.shuffle(values)
    logger.debug("生成随机棋盘 %dx%d counts=%s p=%d seed=%d", m2, m1, list(counts), p, seed)
    return DenseBoard(values.reshape(m1, m2), max(1, len(counts)))


def random_bgsp(m: int, blacks: int, p: int, seed: int, m2: Optional[int] = None) -> DenseBoard:
    """二值实例: 颜色 1 为白, 颜色 2 为黑"""
    m2 = m2 or m
    return random_board(m, m2, [m * m2 - blacks - p, blacks], p, seed)
