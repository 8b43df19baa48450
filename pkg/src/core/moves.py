"""
同步移动模型
一个时间步由若干互不相交的线移动组成; 逐瓦片位移形式的步骤由通用校验器直接检查五条路径约束
"""

import logging
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..models.base_models import Axis, LineShift, Plan, Step, ViolationReport
from .board import ESCORT, Board, DenseBoard
from .errors import IllegalMoveError

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]
Displacement = Dict[Cell, Tuple[int, int]]


def _line_limits(m1: int, m2: int, shift: LineShift) -> Tuple[int, int]:
    """返回 (固定坐标上限, 沿轴坐标上限)"""
    return (m1, m2) if shift.axis == Axis.ROW else (m2, m1)


def check_shift_array(cells: np.ndarray, shift: LineShift) -> Optional[ViolationReport]:
    """在稠密数组上检查单个线移动, 合法时返回 None"""
    m1, m2 = cells.shape
    fixed, along = _line_limits(m1, m2, shift)
    if not (1 <= shift.index <= fixed and 1 <= shift.origin <= along and 1 <= shift.target <= along):
        return ViolationReport.failure("range", f"线移动 {shift.to_text()} 超出 {m2}x{m1} 棋盘")
    line = cells[shift.index - 1, :] if shift.axis == Axis.ROW else cells[:, shift.index - 1]
    if line[shift.origin - 1] != ESCORT:
        return ViolationReport.failure("illegal-shift", f"线移动 {shift.to_text()} 的起点不是护送格")
    lo, hi = sorted((shift.origin, shift.target))
    if int(np.count_nonzero(line[lo - 1:hi] == ESCORT)) != 1:
        return ViolationReport.failure("illegal-shift", f"线移动 {shift.to_text()} 的路径上有其他护送格")
    return None


def _check_shift(board: Board, shift: LineShift) -> Optional[ViolationReport]:
    if not board.is_sparse:
        return check_shift_array(board.array, shift)
    fixed, along = _line_limits(board.m1, board.m2, shift)
    if not (1 <= shift.index <= fixed and 1 <= shift.origin <= along and 1 <= shift.target <= along):
        return ViolationReport.failure("range", f"线移动 {shift.to_text()} 超出 {board.m2}x{board.m1} 棋盘")
    start = (shift.origin, shift.index) if shift.axis == Axis.ROW else (shift.index, shift.origin)
    if not board.is_escort(*start):
        return ViolationReport.failure("illegal-shift", f"线移动 {shift.to_text()} 的起点不是护送格")
    lo, hi = sorted((shift.origin, shift.target))
    for ex, ey in board.escorts:
        along_pos, fixed_pos = (ex, ey) if shift.axis == Axis.ROW else (ey, ex)
        if fixed_pos == shift.index and lo <= along_pos <= hi and along_pos != shift.origin:
            return ViolationReport.failure("illegal-shift", f"线移动 {shift.to_text()} 的路径上有其他护送格")
    return None


def shifts_overlap(a: LineShift, b: LineShift) -> bool:
    """两个线移动触及的格子集合是否相交"""
    a_lo, a_hi = sorted((a.origin, a.target))
    b_lo, b_hi = sorted((b.origin, b.target))
    if a.axis == b.axis:
        return a.index == b.index and a_lo <= b_hi and b_lo <= a_hi
    # 行与列相交当且仅当交点同时落在两段上
    return a_lo <= b.index <= a_hi and b_lo <= a.index <= b_hi


def _check_disjoint(shifts: List[LineShift]) -> Optional[ViolationReport]:
    for i, a in enumerate(shifts):
        for b in shifts[i + 1:]:
            if shifts_overlap(a, b):
                return ViolationReport.failure("overlap", f"线移动 {a.to_text()} 与 {b.to_text()} 相交")
    return None


def validate_step(board: Board, step: Step) -> ViolationReport:
    """检查步骤中每个线移动是否合法且两两不相交"""
    for shift in step.shifts:
        report = _check_shift(board, shift)
        if report is not None:
            return report
    return _check_disjoint(step.shifts) or ViolationReport()


def validate_step_array(cells: np.ndarray, step: Step) -> ViolationReport:
    for shift in step.shifts:
        report = check_shift_array(cells, shift)
        if report is not None:
            return report
    return _check_disjoint(step.shifts) or ViolationReport()


def apply_step(board: Board, step: Step) -> Board:
    """执行一个步骤并返回后继棋盘"""
    report = validate_step(board, step)
    if not report.ok:
        raise IllegalMoveError(report.message)
    if not step.shifts:
        return board
    return board.with_shifts(step.shifts)


def apply_plan(board: Board, plan: Plan) -> Board:
    for step in plan.steps:
        board = apply_step(board, step)
    return board


def expand_step(board: Board, step: Step) -> Displacement:
    """把步骤展开为逐瓦片位移: 源格 -> (dx, dy)"""
    moves: Displacement = {}
    for shift in step.shifts:
        a, b = shift.origin, shift.target
        positions = range(a + 1, b + 1) if a < b else range(b, a)
        delta = -1 if a < b else 1
        for pos in positions:
            if shift.axis == Axis.ROW:
                moves[(pos, shift.index)] = (delta, 0)
            else:
                moves[(shift.index, pos)] = (0, delta)
    return moves


def validate_generic_step(board: Board, moves: Displacement) -> ViolationReport:
    """直接检查任意同步运动的五条约束

    moves 把瓦片的源格映射到位移 (dx, dy), 未列出的瓦片保持不动
    检查顺序: 连续运动, 越界, 相遇碰撞, 对撞, 跟角约束
    """
    active = {cell: d for cell, d in moves.items() if d != (0, 0)}
    for (x, y), (dx, dy) in sorted(active.items()):
        if abs(dx) + abs(dy) > 1:
            return ViolationReport.failure("motion", f"({x},{y}) 处瓦片的位移 ({dx},{dy}) 超过一格")
        if not (1 <= x <= board.m2 and 1 <= y <= board.m1):
            return ViolationReport.failure("range", f"源格 ({x},{y}) 超出棋盘")
        if board.get(x, y) == ESCORT:
            return ViolationReport.failure("motion", f"源格 ({x},{y}) 是护送格, 没有瓦片可移动")
        nx, ny = x + dx, y + dy
        if not (1 <= nx <= board.m2 and 1 <= ny <= board.m1):
            return ViolationReport.failure("range", f"({x},{y}) 处瓦片移出棋盘")

    arrivals: Dict[Cell, Cell] = {}
    for (x, y), (dx, dy) in sorted(active.items()):
        dest = (x + dx, y + dy)
        if dest in arrivals:
            return ViolationReport.failure("meet", f"({x},{y}) 与 {arrivals[dest]} 处瓦片同时到达 {dest}")
        if board.get(*dest) != ESCORT and dest not in active:
            return ViolationReport.failure("meet", f"({x},{y}) 处瓦片撞上静止瓦片 {dest}")
        arrivals[dest] = (x, y)

    for (x, y), (dx, dy) in sorted(active.items()):
        dest = (x + dx, y + dy)
        if dest in active and active[dest] == (-dx, -dy):
            return ViolationReport.failure("head-on", f"({x},{y}) 与 {dest} 处瓦片对撞")

    for (x, y), (dx, dy) in sorted(active.items()):
        dest = (x + dx, y + dy)
        if dest in active and active[dest] != (dx, dy):
            return ViolationReport.failure("cfc", f"({x},{y}) 处瓦片跟进 {dest} 时方向垂直")
    return ViolationReport()


def invert_step(step: Step) -> Step:
    return step.inverted()


def invert_plan(plan: Plan) -> Plan:
    return plan.inverted()


def step_from_shifts(shifts: Iterable[LineShift]) -> Step:
    return Step(shifts=list(shifts))


def dense_copy(board: Board) -> np.ndarray:
    """可写的稠密副本, 供原地模拟使用"""
    if isinstance(board, DenseBoard):
        return board.array.copy()
    return board.to_dense().array.copy()
