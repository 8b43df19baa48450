import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Axis(str, Enum):
    """线移动的方向"""
    ROW = "R"
    COLUMN = "C"


class Corner(str, Enum):
    """护送格聚集的角落"""
    TOP_RIGHT = "top-right"
    TOP_LEFT = "top-left"
    BOTTOM_RIGHT = "bottom-right"
    BOTTOM_LEFT = "bottom-left"


class LineShift(BaseModel):
    """护送格沿一条直线的一次跳跃"""
    model_config = ConfigDict(frozen=True)

    axis: Axis
    index: int  # 固定坐标: 行移动为 y, 列移动为 x
    origin: int  # 护送格当前沿轴的位置
    target: int  # 护送格跳跃后的位置

    @field_validator("target")
    @classmethod
    def _distinct(cls, v: int, info) -> int:
        if info.data.get("origin") == v:
            raise ValueError("线移动的起点与终点不能相同")
        return v

    def cells(self) -> List[tuple]:
        """该移动触及的所有格子 (含起点与终点)"""
        lo, hi = sorted((self.origin, self.target))
        if self.axis == Axis.ROW:
            return [(x, self.index) for x in range(lo, hi + 1)]
        return [(self.index, y) for y in range(lo, hi + 1)]

    def inverted(self) -> "LineShift":
        return LineShift(axis=self.axis, index=self.index, origin=self.target, target=self.origin)

    def to_text(self) -> str:
        return f"{self.axis.value} {self.index} {self.origin} {self.target}"


class Step(BaseModel):
    """一个同步时间步: 一组互不相交的线移动"""
    model_config = ConfigDict(frozen=True)

    shifts: List[LineShift] = Field(default_factory=list)

    def inverted(self) -> "Step":
        return Step(shifts=[s.inverted() for s in self.shifts])


class Plan(BaseModel):
    """按时间顺序排列的步骤序列"""
    steps: List[Step] = Field(default_factory=list)

    @property
    def makespan(self) -> int:
        return len(self.steps)

    def extend(self, other: "Plan") -> "Plan":
        return Plan(steps=list(self.steps) + list(other.steps))

    def inverted(self) -> "Plan":
        """逆向计划: 作用于终点局面可回到起点局面"""
        return Plan(steps=[s.inverted() for s in reversed(self.steps)])


class GoalSpec(BaseModel):
    """目标局面: 显式棋盘或分层排列"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: str = "layered"  # explicit 或 layered
    board: Optional[Any] = None  # kind == explicit 时的目标棋盘
    order: List[int] = Field(default_factory=list)  # 颜色自底向上的顺序
    corner: Corner = Corner.TOP_RIGHT
    axis: str = "rows"  # rows: 按行填充; columns: 按列填充

    @classmethod
    def explicit(cls, board: Any) -> "GoalSpec":
        return cls(kind="explicit", board=board)

    @classmethod
    def layered(cls, order: List[int], corner: Corner = Corner.TOP_RIGHT, axis: str = "rows") -> "GoalSpec":
        return cls(kind="layered", order=list(order), corner=corner, axis=axis)


class ViolationReport(BaseModel):
    """校验结果, 失败时指明第一个被违反的约束"""
    ok: bool = True
    kind: Optional[str] = None  # range, illegal-shift, overlap, motion, meet, head-on, cfc, final, histogram
    message: str = ""
    step_index: Optional[int] = None
    makespan: Optional[int] = None

    @classmethod
    def failure(cls, kind: str, message: str, step_index: Optional[int] = None) -> "ViolationReport":
        return cls(ok=False, kind=kind, message=message, step_index=step_index)


class CnfFormula(BaseModel):
    """3SAT 公式: 变量 x_1..x_N, 子句为带符号的整数文字"""
    num_vars: int
    clauses: List[List[int]] = Field(default_factory=list)

    @field_validator("clauses")
    @classmethod
    def _check_clauses(cls, clauses: List[List[int]], info) -> List[List[int]]:
        n = info.data.get("num_vars", 0)
        for j, clause in enumerate(clauses, start=1):
            if not clause:
                raise ValueError(f"第 {j} 个子句为空")
            if len(clause) > 3:
                raise ValueError(f"第 {j} 个子句超过 3 个文字")
            for lit in clause:
                if lit == 0 or abs(lit) > n:
                    raise ValueError(f"第 {j} 个子句的文字 {lit} 超出变量范围 1..{n}")
        return clauses

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def is_satisfied(self, assignment: List[bool]) -> bool:
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in clause) for clause in self.clauses)


class LayerExtent(BaseModel):
    """H 中一层 (或填充行) 的行范围, 闭区间"""
    name: str
    y_lo: int
    y_hi: int

    @property
    def height(self) -> int:
        return self.y_hi - self.y_lo + 1


class ColumnExtent(BaseModel):
    """一组列的范围, 闭区间"""
    name: str
    x_lo: int
    x_hi: int


class ReductionLayout(BaseModel):
    """归约实例的全部推导尺寸与层/列范围"""
    num_vars: int
    num_clauses: int
    ell: int
    h: int
    q: int
    r: int
    c: int
    m: int
    w: int = 0  # G 中白格数, 也是获胜所需回合数
    K: int = 0  # 步数上界 4w
    layers: List[LayerExtent] = Field(default_factory=list)  # 自底向上, 覆盖 1..2rc+r
    gadgets: List[LayerExtent] = Field(default_factory=list)  # 文字小工具, name 形如 x1 / -x1
    columns: List[ColumnExtent] = Field(default_factory=list)  # reward, clause, variable, state
    clauses: List[List[int]] = Field(default_factory=list)  # 推导所用公式的子句, 重放回合时重建 H

    def layer(self, name: str) -> LayerExtent:
        for item in self.layers:
            if item.name == name:
                return item
        raise KeyError(name)

    def gadget(self, literal: int) -> LayerExtent:
        name = f"x{literal}" if literal > 0 else f"-x{-literal}"
        for item in self.gadgets:
            if item.name == name:
                return item
        raise KeyError(name)

    def column(self, name: str) -> ColumnExtent:
        for item in self.columns:
            if item.name == name:
                return item
        raise KeyError(name)


class StagePlan(BaseModel):
    """分治算法一个阶段的步骤与代价记账"""
    tag: str  # Spread, Normalize8, MergeRows(i), MergeCols(i), FinalDrag ...
    steps: List[Step] = Field(default_factory=list)
    attributed_steps: int = 0  # 归因到黑格搬运的步数
    base_steps: int = 0  # 护送格巡游等基础开销
    blacks: int = 0  # 阶段开始时的黑格数
    flags: List[str] = Field(default_factory=list)

    def add_steps(self, steps: List[Step], attributed: bool) -> int:
        """追加步骤并计入对应的代价类别"""
        self.steps.extend(steps)
        if attributed:
            self.attributed_steps += len(steps)
        else:
            self.base_steps += len(steps)
        return len(self.steps)

    def get_cost_summary(self) -> Dict[str, Any]:
        per_black = self.attributed_steps / self.blacks if self.blacks else 0.0
        return {
            "stage": self.tag,
            "steps": len(self.steps),
            "attributed": self.attributed_steps,
            "base": self.base_steps,
            "attributed_per_black": round(per_black, 4),
        }


class BenchRecord(BaseModel):
    """基准测试的一行记录"""
    m1: int
    m2: int
    k: int
    B: int
    p: int
    seed: int
    algorithm: str
    lower_bound: Optional[int] = None
    makespan: Optional[int] = None  # 必须不小于 lower_bound
    wall_time: float = 0.0
    ratio: Optional[float] = None  # makespan / (m log2 m + B log2 B)
    stages: Dict[str, int] = Field(default_factory=dict)
    status: str = "ok"  # ok 或 failed
    error: Optional[str] = None
    started_at: str = Field(default_factory=lambda: datetime.datetime.now().isoformat())

    @field_validator("makespan")
    @classmethod
    def _not_below_bound(cls, v: Optional[int], info) -> Optional[int]:
        lb = info.data.get("lower_bound")
        if v is not None and lb is not None and v < lb:
            raise ValueError(f"makespan {v} 低于下界 {lb}")
        return v

    @property
    def key(self) -> tuple:
        return (self.m1, self.m2, self.k, self.B, self.p, self.seed, self.algorithm)


class CollapseStats(BaseModel):
    """网格坍缩博弈的列占用统计"""
    grid_side: int
    samples: int  # B'
    trials: int
    seed: int
    max_p: int = 8
    mean_rows: Dict[int, float] = Field(default_factory=dict)  # 按行统计的 X_p 均值
    mean_cols: Dict[int, float] = Field(default_factory=dict)  # 按列统计的 X_p 均值
    thresholds: Dict[int, float] = Field(default_factory=dict)
    pass_fraction: Dict[int, float] = Field(default_factory=dict)  # 两个方向都满足阈值的试验比例
    identity_fraction: float = 0.0  # 满足 sum p*X_p = B' 的试验比例


class SearchResult(BaseModel):
    """精确搜索的结果"""
    status: str  # optimal, exhausted 或 unreachable
    makespan: Optional[int] = None
    plan: Optional[Plan] = None
    expanded: int = 0  # 展开的状态数


class PlayResult(BaseModel):
    """沙堡游戏回合序列的回放结果"""
    outcome: str  # win, loss, stuck, incomplete
    index: Optional[int] = None  # loss/stuck 发生的回合下标
    holes_left: int = 0


class Turn(BaseModel):
    """沙堡游戏的一个回合, 以坍缩前所选开放格的坐标表示"""
    model_config = ConfigDict(frozen=True)

    x: int
    y: int
