"""
目标局面构造
分层目标: 按给定颜色顺序自底向上 (或自左向右) 填充, 护送格聚集在指定角落
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..models.base_models import Corner, GoalSpec
from .board import ESCORT, Board, DenseBoard, SparseBoard
from .errors import BoardError, IncompatibleInstanceError

logger = logging.getLogger(__name__)

ROWS = "rows"
COLUMNS = "columns"


def default_order(k: int) -> List[int]:
    """默认颜色顺序: 编号大的颜色在底部, 二值棋盘即黑色在下"""
    return list(range(k, 0, -1))


def corner_cell(m1: int, m2: int, corner: Corner) -> Tuple[int, int]:
    return {
        Corner.TOP_RIGHT: (m2, m1),
        Corner.TOP_LEFT: (1, m1),
        Corner.BOTTOM_RIGHT: (m2, 1),
        Corner.BOTTOM_LEFT: (1, 1),
    }[Corner(corner)]


def escort_cells(m1: int, m2: int, p: int, corner: Corner, axis: str = ROWS) -> List[Tuple[int, int]]:
    """距角落最近的 p 个格子

    按行填充时以 (|y-cy|, |x-cx|) 排序, 按列填充时以 (|x-cx|, |y-cy|) 排序
    """
    cx, cy = corner_cell(m1, m2, corner)
    x_step = -1 if cx == m2 else 1
    y_step = -1 if cy == m1 else 1
    cells = []
    if axis == ROWS:
        for d in range(m1):
            for i in range(m2):
                if len(cells) == p:
                    return cells
                cells.append((cx + x_step * i, cy + y_step * d))
    else:
        for d in range(m2):
            for i in range(m1):
                if len(cells) == p:
                    return cells
                cells.append((cx + x_step * d, cy + y_step * i))
    return cells


def _check_order(order: Sequence[int], k: int) -> List[int]:
    order = list(order)
    if sorted(order) != list(range(1, k + 1)):
        raise BoardError(f"颜色顺序 {order} 不是 1..{k} 的排列")
    return order


def _linear(x: int, y: int, m1: int, m2: int, axis: str) -> int:
    return (y - 1) * m2 + (x - 1) if axis == ROWS else (x - 1) * m1 + (y - 1)


def canonical_goal(board: Board, order: Optional[Sequence[int]] = None,
                   corner: Corner = Corner.TOP_RIGHT, axis: str = ROWS) -> Board:
    """按颜色顺序分层排列的目标棋盘, 稠密输入得到稠密结果, 稀疏输入得到稀疏结果"""
    if axis not in (ROWS, COLUMNS):
        raise BoardError(f"未知的填充方向 {axis}")
    order = _check_order(order if order is not None else default_order(board.k), board.k)
    hist = board.histogram()
    p = hist.get(ESCORT, 0)
    if board.is_sparse:
        return _sparse_goal(board.m1, board.m2, board.k, hist, order, corner, axis, default=board.default)
    return _dense_goal(board.m1, board.m2, board.k, hist, order, corner, axis, p)


def _dense_goal(m1: int, m2: int, k: int, hist: dict, order: List[int], corner: Corner, axis: str,
                p: int) -> DenseBoard:
    ys, xs = np.mgrid[1:m1 + 1, 1:m2 + 1]
    cx, cy = corner_cell(m1, m2, corner)
    dy, dx = np.abs(ys - cy), np.abs(xs - cx)
    if axis == ROWS:
        rank = dy * (m2 + 1) + dx
        fill = np.arange(m1 * m2).reshape(m1, m2)
    else:
        rank = dx * (m1 + 1) + dy
        fill = np.arange(m1 * m2).reshape(m2, m1).T
    escort_flat = np.argsort(rank, axis=None, kind="stable")[:p]
    cells = np.empty((m1, m2), dtype=np.int8)
    is_escort = np.zeros(m1 * m2, dtype=bool)
    is_escort[escort_flat] = True
    is_escort = is_escort.reshape(m1, m2)
    cells[is_escort] = ESCORT
    # 按填充顺序排列非护送格
    tile_positions = np.argsort(np.where(is_escort, -1, fill), axis=None, kind="stable")[p:]
    colors = np.repeat(np.array(order, dtype=np.int8), [hist.get(c, 0) for c in order])
    cells.reshape(-1)[tile_positions] = colors
    return DenseBoard(cells, k)


def linear_segments(m1: int, m2: int, hist: dict, order: List[int], escorts: List[Tuple[int, int]],
                    axis: str) -> List[Tuple[int, int]]:
    """目标在填充顺序上的分段 (起始线性位置, 值), 相邻同值已合并"""
    marks = sorted(_linear(x, y, m1, m2, axis) for x, y in escorts)
    segs: List[Tuple[int, int]] = []

    def push(pos: int, value: int) -> None:
        if not segs or segs[-1][1] != value:
            segs.append((pos, value))

    pos = 0
    e = 0
    for color in order:
        remaining = hist.get(color, 0)
        while remaining > 0:
            while e < len(marks) and marks[e] == pos:
                push(pos, ESCORT)
                pos += 1
                e += 1
            room = (marks[e] - pos) if e < len(marks) else remaining
            take = min(room, remaining)
            push(pos, color)
            pos += take
            remaining -= take
    while e < len(marks):
        push(marks[e], ESCORT)
        e += 1
    return segs


def _row_runs(y: int, segs: List[Tuple[int, int]], m1: int, m2: int, axis: str) -> List[Tuple[int, int]]:
    """第 y 行的 (起始 x, 值) 游程"""
    runs: List[Tuple[int, int]] = []
    for start, value in segs:
        if axis == ROWS:
            first = start - (y - 1) * m2 + 1
        else:
            first = math.ceil((start - (y - 1)) / m1) + 1
        first = max(first, 1)
        if first > m2:
            break
        while runs and runs[-1][0] >= first:
            runs.pop()
        runs.append((first, value))
    return runs


def _sparse_goal(m1: int, m2: int, k: int, hist: dict, order: List[int], corner: Corner, axis: str,
                 default: int) -> SparseBoard:
    escorts = escort_cells(m1, m2, hist.get(ESCORT, 0), corner, axis)
    segs = linear_segments(m1, m2, hist, order, escorts, axis)
    candidates = {1}
    for start, _ in segs:
        y = start // m2 + 1 if axis == ROWS else start % m1 + 1
        candidates.update((y, y + 1))
    rows = sorted(y for y in candidates if 1 <= y <= m1)
    bands = []
    for y_lo, y_next in zip(rows, rows[1:] + [m1 + 1]):
        runs = _row_runs(y_lo, segs, m1, m2, axis)
        widths = [(nxt[0] if nxt else m2 + 1) - x for (x, _), nxt in zip(runs, runs[1:] + [None])]
        bands.append((y_lo, y_next - 1, [(w, v) for w, (_, v) in zip(widths, runs)]))
    return SparseBoard.from_bands(m1, m2, k, bands, default=default)


def goal_board(goal: GoalSpec, board: Board) -> Board:
    """把目标描述落实为棋盘"""
    if goal.kind == "explicit":
        if goal.board is None:
            raise BoardError("显式目标缺少棋盘")
        target = goal.board
        if (target.m1, target.m2) != (board.m1, board.m2):
            raise IncompatibleInstanceError("目标棋盘尺寸与起点不同")
        return target
    order = goal.order or default_order(board.k)
    return canonical_goal(board, order, goal.corner, goal.axis)
