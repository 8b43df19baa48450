"""
小棋盘上的最优 makespan 搜索
状态为颜色映射 (同色瓦片不可区分), 每个时间步枚举至多 p 个互不相交的线移动
"""

import itertools
import logging
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from ..core.board import ESCORT, Board, DenseBoard, apply_shift_inplace
from ..core.errors import BoardError, CapExceededError
from ..core.goals import canonical_goal
from ..core.moves import shifts_overlap
from ..core.plan import check_compatible, resolve_goal
from ..models.base_models import Axis, GoalSpec, LineShift, Plan, SearchResult, Step

logger = logging.getLogger(__name__)

EXACT_CAP_CELLS = 12
EXACT_MAX_ESCORTS = 2
DEFAULT_BUDGET = 200_000


def canonical_key(board: Union[Board, np.ndarray]) -> bytes:
    """颜色映射的字节串, 同色瓦片互换不改变键"""
    cells = board if isinstance(board, np.ndarray) else _dense(board).array
    m1, m2 = cells.shape
    return f"{m1}x{m2}:".encode() + np.ascontiguousarray(cells, dtype=np.int8).tobytes()


def _dense(board: Board) -> DenseBoard:
    return board.to_dense() if board.is_sparse else board


def _shift_options(cells: np.ndarray, x: int, y: int) -> List[LineShift]:
    """从 (x, y) 出发、途中不经过其他护送格的全部线移动"""
    m1, m2 = cells.shape
    options = []
    for axis, pos, limit in ((Axis.ROW, x, m2), (Axis.COLUMN, y, m1)):
        index = y if axis == Axis.ROW else x
        for direction in (-1, 1):
            t = pos + direction
            while 1 <= t <= limit:
                value = cells[y - 1, t - 1] if axis == Axis.ROW else cells[t - 1, x - 1]
                if value == ESCORT:
                    break
                options.append(LineShift(axis=axis, index=index, origin=pos, target=t))
                t += direction
    return options


def legal_steps(cells: np.ndarray) -> Iterator[List[LineShift]]:
    """枚举所有非空的合法步骤, 每个护送格至多一次线移动"""
    ys, xs = np.nonzero(cells == ESCORT)
    per_escort = [_shift_options(cells, int(x) + 1, int(y) + 1) + [None] for x, y in zip(xs, ys)]
    for combo in itertools.product(*per_escort):
        shifts = [s for s in combo if s is not None]
        if not shifts:
            continue
        if any(shifts_overlap(a, b) for a, b in itertools.combinations(shifts, 2)):
            continue
        yield shifts


def _apply(cells: np.ndarray, shifts: List[LineShift]) -> np.ndarray:
    child = cells.copy()
    for shift in shifts:
        apply_shift_inplace(child, shift)
    return child


def _prepare(board: Board, goal: Union[GoalSpec, Board, None], p: Optional[int],
             cap: int, max_escorts: int) -> Tuple[DenseBoard, DenseBoard]:
    start = _dense(board)
    cells = start.m1 * start.m2
    if cells > cap:
        raise CapExceededError(f"精确搜索至多支持 {cap} 个格子, 棋盘有 {cells} 个")
    escorts = len(start.escorts)
    if p is not None and p != escorts:
        raise BoardError(f"指定的护送格数 {p} 与棋盘上的 {escorts} 个不一致")
    if escorts > max_escorts:
        raise CapExceededError(f"精确搜索至多支持 {max_escorts} 个护送格, 棋盘有 {escorts} 个")
    target = canonical_goal(start) if goal is None else _dense(resolve_goal(start, goal))
    check_compatible(start, target)
    return start, target


def bfs_optimal(board: Board, goal: Union[GoalSpec, Board, None] = None, p: Optional[int] = None,
                budget: int = DEFAULT_BUDGET, cap: int = EXACT_CAP_CELLS,
                max_escorts: int = EXACT_MAX_ESCORTS) -> SearchResult:
    """逐层 BFS, 返回最小 makespan 与一个见证计划; 超出展开预算时返回 exhausted"""
    start, target = _prepare(board, goal, p, cap, max_escorts)
    goal_key = canonical_key(target.array)
    start_key = canonical_key(start.array)
    if start_key == goal_key:
        return SearchResult(status="optimal", makespan=0, plan=Plan())
    parent: Dict[bytes, Optional[Tuple[bytes, Step]]] = {start_key: None}
    frontier = [(start_key, start.array)]
    depth = expanded = 0
    while frontier:
        depth += 1
        layer = []
        for key, cells in frontier:
            if expanded >= budget:
                logger.info("BFS 在深度 %d 用尽预算 %d", depth, budget)
                return SearchResult(status="exhausted", expanded=expanded)
            expanded += 1
            for shifts in legal_steps(cells):
                child = _apply(cells, shifts)
                child_key = canonical_key(child)
                if child_key in parent:
                    continue
                parent[child_key] = (key, Step(shifts=shifts))
                if child_key == goal_key:
                    return SearchResult(status="optimal", makespan=depth,
                                        plan=_reconstruct(parent, child_key), expanded=expanded)
                layer.append((child_key, child))
        frontier = layer
    return SearchResult(status="unreachable", expanded=expanded)


def _reconstruct(parent: Dict[bytes, Optional[Tuple[bytes, Step]]], key: bytes) -> Plan:
    steps = []
    while parent[key] is not None:
        key, step = parent[key]
        steps.append(step)
    return Plan(steps=steps[::-1])


def iddfs_optimal(board: Board, goal: Union[GoalSpec, Board, None] = None, max_depth: int = 10,
                  cap: int = EXACT_CAP_CELLS, max_escorts: int = EXACT_MAX_ESCORTS) -> Optional[int]:
    """迭代加深搜索, 与 BFS 互相独立, 用于交叉检查; 超过 max_depth 返回 None"""
    start, target = _prepare(board, goal, None, cap, max_escorts)
    goal_key = canonical_key(target.array)

    def dfs(cells: np.ndarray, remaining: int, seen: Dict[bytes, int]) -> bool:
        key = canonical_key(cells)
        if key == goal_key:
            return True
        if remaining == 0 or seen.get(key, -1) >= remaining:
            return False
        seen[key] = remaining
        return any(dfs(_apply(cells, shifts), remaining - 1, seen) for shifts in legal_steps(cells))

    for limit in range(max_depth + 1):
        if dfs(start.array, limit, {}):
            return limit
    return None
