"""
计划校验与执行
"""

import logging
from typing import Optional, Tuple, Union

from ..models.base_models import GoalSpec, Plan, ViolationReport
from .board import Board, DenseBoard, apply_shift_inplace, boards_equal
from .errors import IncompatibleInstanceError
from .goals import goal_board
from .moves import validate_step, validate_step_array

logger = logging.getLogger(__name__)


def resolve_goal(start: Board, goal: Union[GoalSpec, Board]) -> Board:
    """目标可以是 GoalSpec 或直接给出的棋盘"""
    if isinstance(goal, GoalSpec):
        return goal_board(goal, start)
    return goal


def check_compatible(start: Board, goal: Board) -> None:
    if (start.m1, start.m2) != (goal.m1, goal.m2):
        raise IncompatibleInstanceError(f"尺寸不一致: {start.m2}x{start.m1} 与 {goal.m2}x{goal.m1}")
    a, b = start.histogram(), goal.histogram()
    keys = set(a) | set(b)
    if any(a.get(c, 0) != b.get(c, 0) for c in keys):
        raise IncompatibleInstanceError(f"颜色直方图不一致: {dict(sorted(a.items()))} 与 {dict(sorted(b.items()))}")


def execute_plan(start: Board, plan: Plan) -> Tuple[Optional[Board], ViolationReport]:
    """逐步执行计划, 返回 (终局, 报告); 失败时终局为 None"""
    if isinstance(start, DenseBoard):
        cells = start.array.copy()
        for i, step in enumerate(plan.steps):
            report = validate_step_array(cells, step)
            if not report.ok:
                report.step_index = i
                return None, report
            for shift in step.shifts:
                apply_shift_inplace(cells, shift)
        return DenseBoard(cells, start.k), ViolationReport(makespan=plan.makespan)

    board = start
    for i, step in enumerate(plan.steps):
        report = validate_step(board, step)
        if not report.ok:
            report.step_index = i
            return None, report
        if step.shifts:
            board = board.with_shifts(step.shifts)
    return board, ViolationReport(makespan=plan.makespan)


def validate_plan(start: Board, goal: Union[GoalSpec, Board], plan: Plan) -> ViolationReport:
    """校验计划: 每一步合法, 且终局与目标的颜色映射一致"""
    target = resolve_goal(start, goal)
    check_compatible(start, target)
    final, report = execute_plan(start, plan)
    if final is None:
        logger.info("计划在第 %s 步失败: %s", report.step_index, report.message)
        return report
    if not boards_equal(final, target):
        return ViolationReport.failure("final", "终局与目标不一致", step_index=plan.makespan)
    return ViolationReport(makespan=plan.makespan)
