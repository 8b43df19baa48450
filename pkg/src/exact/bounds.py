"""
实例相关的 makespan 下界
每个瓦片每步至多移动一格; 每步至多 p 次线移动, 每次至多移动 max(m1, m2) - 1 个瓦片
"""

import logging
import math
from typing import Dict, Optional, Union

import numpy as np
from scipy.ndimage import distance_transform_cdt
from scipy.optimize import linear_sum_assignment

from ..core.board import ESCORT, Board
from ..core.errors import CapExceededError
from ..core.goals import canonical_goal
from ..core.plan import check_compatible, resolve_goal
from ..models.base_models import GoalSpec

logger = logging.getLogger(__name__)

BOUND_CAP_CELLS = 4_000_000
TRANSPORT_CAP_CELLS = 64 * 64

Goal = Union[GoalSpec, Board, None]


def _pair(board: Board, goal: Goal, cap: int):
    if board.m1 * board.m2 > cap:
        raise CapExceededError(f"棋盘 {board.m2}x{board.m1} 超过下界计算的上限 {cap} 个格子")
    start = board.to_dense() if board.is_sparse else board
    target = canonical_goal(start) if goal is None else resolve_goal(start, goal)
    target = target.to_dense() if target.is_sparse else target
    check_compatible(start, target)
    return start.array, target.array


def _nearest_distances(start: np.ndarray, target: np.ndarray) -> Dict[int, np.ndarray]:
    """每种颜色: 起点中该色瓦片到目标中最近同色格子的曼哈顿距离"""
    result = {}
    for color in np.unique(start):
        color = int(color)
        if color == ESCORT:
            continue
        # 距离变换计算每个非零格到最近零格的距离, 目标同色格为零
        dist = distance_transform_cdt(target != color, metric="taxicab")
        result[color] = dist[start == color]
    return result


def lb_distance(board: Board, goal: Goal = None, cap: int = BOUND_CAP_CELLS) -> int:
    """单个瓦片到最近同色目标格的最大距离"""
    start, target = _pair(board, goal, cap)
    distances = _nearest_distances(start, target)
    return max((int(d.max()) for d in distances.values() if d.size), default=0)


def _per_step(board: Board, p: Optional[int]) -> int:
    escorts = p if p is not None else len(board.escorts)
    return max(1, escorts) * max(board.m1, board.m2)


def lb_manhattan(board: Board, goal: Goal = None, p: Optional[int] = None, cap: int = BOUND_CAP_CELLS) -> int:
    """最近格松弛下的总曼哈顿距离除以每步可减少的量"""
    start, target = _pair(board, goal, cap)
    total = sum(int(d.sum()) for d in _nearest_distances(start, target).values())
    return math.ceil(total / _per_step(board, p))


def lb_transport(board: Board, goal: Goal = None, p: Optional[int] = None,
                 cap: int = TRANSPORT_CAP_CELLS) -> int:
    """同色瓦片与目标格之间的最小费用完美匹配, 比最近格松弛更紧"""
    start, target = _pair(board, goal, cap)
    total = 0
    for color in np.unique(start):
        color = int(color)
        if color == ESCORT:
            continue
        src = np.argwhere(start == color)
        dst = np.argwhere(target == color)
        cost = np.abs(src[:, 0, None] - dst[None, :, 0]) + np.abs(src[:, 1, None] - dst[None, :, 1])
        rows, cols = linear_sum_assignment(cost)
        total += int(cost[rows, cols].sum())
    return math.ceil(total / _per_step(board, p))


def lb(board: Board, goal: Goal = None, p: Optional[int] = None, exact_transport: bool = False,
       cap: int = BOUND_CAP_CELLS) -> int:
    """各下界的最大值"""
    bound = max(lb_distance(board, goal, cap), lb_manhattan(board, goal, p, cap))
    if exact_transport:
        bound = max(bound, lb_transport(board, goal, p))
    logger.debug("下界 %d (exact_transport=%s)", bound, exact_transport)
    return bound


def makespan_shape(m: int, r: float, p: int = 1) -> float:
    """渐近上界的形状 m log m + m^r log m / p, 用于基准中的比值"""
    if m < 2:
        return 1.0
    return m * math.log2(m) + (m ** r) * math.log2(m) / max(1, p)

