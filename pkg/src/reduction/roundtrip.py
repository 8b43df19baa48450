"""
归约的两个构造方向
满足赋值 -> 获胜回合 -> 单护送格计划, 以及获胜回合 -> 满足赋值
"""

import itertools
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..core.board import BLACK
from ..core.errors import IllegalMoveError, IncompatibleInstanceError, PlanningError
from ..models.base_models import Axis, CnfFormula, LineShift, Plan, ReductionLayout, Step, Turn
from ..scg.game import HOLE, SAND, ScgBoard, collapse_inplace, play
from .builder import rasterize_h
from .layout import literal_order

logger = logging.getLogger(__name__)


def fresh_scg(f: CnfFormula, layout: ReductionLayout) -> ScgBoard:
    """直接由栅格得到初始的嵌入沙堡网格"""
    return ScgBoard(np.where(rasterize_h(f, layout) == BLACK, SAND, HOLE).astype(np.uint8))


class _TurnRecorder:
    """在模拟网格上执行并记录回合, 每个回合执行前检查开放性"""

    def __init__(self, scg: ScgBoard):
        self.board = scg.clone()
        self.turns: List[Turn] = []
        self.stage = ""

    def collapse(self, x: int, y: int) -> None:
        if not self.board.is_open_row(y):
            raise PlanningError(f"{self.stage}阶段的回合 ({x},{y}) 不是开放格")
        turn = Turn(x=x, y=y)
        collapse_inplace(self.board, turn)
        self.turns.append(turn)

    def is_hole(self, x: int, y: int) -> bool:
        return self.board.get(x, y) == HOLE


def assignment_to_turns(f: CnfFormula, layout: ReductionLayout, assignment: Sequence[bool],
                        scg: Optional[ScgBoard] = None) -> List[Turn]:
    """由满足赋值构造嵌入沙堡游戏的获胜回合序列

    分三个阶段: 子句满足, 奖励, 清理
    """
    if len(assignment) != f.num_vars:
        raise IncompatibleInstanceError(f"赋值长度 {len(assignment)} 与变量数 {f.num_vars} 不一致")
    if not f.is_satisfied(list(assignment)):
        raise IncompatibleInstanceError("赋值不满足公式")
    rec = _TurnRecorder(scg if scg is not None else fresh_scg(f, layout))
    n, q, c, h = f.num_vars, layout.q, layout.c, layout.h
    var_lo = q + f.num_clauses
    y_control = layout.layer("control").y_lo

    rec.stage = "子句满足"
    satisfied = set()
    for i in range(1, n + 1):
        value = bool(assignment[i - 1])
        literal = i if value else -i
        first, second = (2 * i - 1, 2 * i) if value else (2 * i, 2 * i - 1)
        rec.collapse(var_lo + first, y_control)
        y_bottom = layout.gadget(literal).y_lo
        for j, clause in enumerate(f.clauses, start=1):
            # 只有第一个为真的文字负责满足子句
            if j in satisfied or literal not in clause:
                continue
            for _ in range(h):
                rec.collapse(q + j, y_bottom)
            satisfied.add(j)
        rec.collapse(var_lo + second, y_control)

    rec.stage = "奖励"
    y_clause = layout.layer("clause").y_lo
    for x in range(1, c + 1):
        rec.collapse(x, y_clause)

    rec.stage = "清理"
    for gadget in layout.gadgets:
        rec.collapse(c - 1, gadget.y_lo)
        rec.collapse(c, gadget.y_lo)
    rec.collapse(c - 1, y_control)
    rec.collapse(c, y_control)
    rec.collapse(c - 1, 1)
    y_vacuum = layout.layer("vacuum").y_lo
    y_gravity = layout.layer("gravity").y_lo
    for x in range(q + 1, c - 1):
        rec.collapse(x, y_vacuum)
        while rec.is_hole(x, y_gravity):
            rec.collapse(x, y_gravity)
            while rec.is_hole(x, y_vacuum):
                rec.collapse(x, y_vacuum)
    rec.collapse(c - 1, y_vacuum)
    rec.collapse(c, y_vacuum)
    rec.collapse(c - 1, y_gravity)
    rec.collapse(c, y_gravity)
    rec.collapse(c, 1)

    if rec.board.holes != 0:
        raise PlanningError(f"清理结束后仍有 {rec.board.holes} 个洞")
    logger.info("构造了 %d 个回合 (w=%d)", len(rec.turns), layout.w)
    return rec.turns


def lift_turn(layout: ReductionLayout, turn: Turn) -> List[Step]:
    """一个回合对应护送格的四次跳跃: 沿右边界下行, 沿开放行左移, 沿该列上行, 沿顶行右移"""
    m = layout.m
    shifts = [
        LineShift(axis=Axis.COLUMN, index=m, origin=m, target=turn.y),
        LineShift(axis=Axis.ROW, index=turn.y, origin=m, target=turn.x),
        LineShift(axis=Axis.COLUMN, index=turn.x, origin=turn.y, target=m),
        LineShift(axis=Axis.ROW, index=m, origin=turn.x, target=m),
    ]
    return [Step(shifts=[s]) for s in shifts]


def layout_scg(layout: ReductionLayout) -> ScgBoard:
    """由布局记录的子句重建初始嵌入沙堡网格"""
    if len(layout.clauses) != layout.num_clauses:
        raise IncompatibleInstanceError(f"布局记录了 {len(layout.clauses)} 个子句, 应为 {layout.num_clauses}")
    return fresh_scg(CnfFormula(num_vars=layout.num_vars, clauses=layout.clauses), layout)


def turns_to_plan(layout: ReductionLayout, turns: Sequence[Turn], scg: Optional[ScgBoard] = None) -> Plan:
    """把获胜回合序列提升为实例上的计划, makespan 恰为 4w

    回合总是先在嵌入沙堡网格上重放, 不是获胜序列就拒绝
    """
    result = play(scg if scg is not None else layout_scg(layout), turns)
    if result.outcome != "win":
        raise IllegalMoveError(f"回合序列没有赢得沙堡游戏: {result.outcome}")
    steps: List[Step] = []
    for turn in turns:
        steps.extend(lift_turn(layout, turn))
    return Plan(steps=steps)


def extract_assignment(f: CnfFormula, layout: ReductionLayout, turns: Sequence[Turn],
                       scg: Optional[ScgBoard] = None) -> List[bool]:
    """从获胜回合中读出被激活的文字, 未激活的变量取真"""
    board = (scg if scg is not None else fresh_scg(f, layout)).clone()
    q, c = layout.q, layout.c
    var_lo, var_hi = q + f.num_clauses + 1, q + f.num_clauses + 2 * f.num_vars
    bottoms: Dict[int, int] = {g.y_lo: lit for lit, g in zip(literal_order(f.num_vars), layout.gadgets)}
    activated = set()
    for index, turn in enumerate(turns):
        if not (1 <= turn.x <= c) or not board.is_open_row(turn.y):
            raise IllegalMoveError(f"第 {index} 个回合 ({turn.x},{turn.y}) 不是开放格")
        if turn.y in bottoms and q < turn.x <= q + f.num_clauses:
            row = board.grid[turn.y - 1, var_lo - 1:var_hi]
            if (row == HOLE).all():
                activated.add(bottoms[turn.y])
        collapse_inplace(board, turn)
    if board.holes != 0:
        raise IllegalMoveError("回合序列没有赢得沙堡游戏")
    assignment = [not (-i in activated and i not in activated) for i in range(1, f.num_vars + 1)]
    if not f.is_satisfied(assignment):
        raise PlanningError(f"激活的文字 {sorted(activated)} 没有给出满足赋值")
    return assignment


def satisfying_assignments(f: CnfFormula) -> List[List[bool]]:
    """穷举全部满足赋值, 只用于小公式"""
    found = []
    for values in itertools.product((True, False), repeat=f.num_vars):
        if f.is_satisfied(list(values)):
            found.append(list(values))
    return found
