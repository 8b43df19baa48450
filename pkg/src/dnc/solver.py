"""
分治求解入口
二值问题走 分散/规整/合并/拖拽 流水线; 多色问题按颜色顺序逐色做二值排序, 每一轮只处理尚未就位的上部区域;
多护送格时按竖条分区, 各条带用同一条流水线排序后按时间步合并, 再把护送格沿顶行推到角落
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.board import BLACK, ESCORT, WHITE, Board, DenseBoard, apply_shift_inplace
from ..core.errors import BoardError, CapExceededError, IncompatibleInstanceError, PlanningError, UnsupportedError
from ..core.goals import canonical_goal, default_order
from ..core.plan import check_compatible, resolve_goal, validate_plan
from ..models.base_models import Axis, GoalSpec, LineShift, Plan, StagePlan, Step
from .planner import Box, Cell, PlanBuilder, StuckError, move_tile
from .region import RegionSorter, packed_target
from .stages import final_drag, sort_binary

logger = logging.getLogger(__name__)

DENSE_CAP = 1 << 24

Goal = Union[GoalSpec, Board, None]


def _prepare(board: Board, p: Optional[int], cap: int) -> DenseBoard:
    if board.is_sparse:
        if board.m1 * board.m2 > cap:
            raise CapExceededError(f"稀疏棋盘 {board.m2}x{board.m1} 超过求解器的稠密上限 {cap}")
        board = board.to_dense()
    escorts = len(board.escorts)
    if escorts == 0:
        raise BoardError("棋盘上没有护送格")
    if p is not None and p != escorts:
        raise BoardError(f"指定的护送格数 {p} 与棋盘上的 {escorts} 个不一致")
    return board


def _dense_target(start: DenseBoard, goal: Goal) -> DenseBoard:
    if goal is None:
        return canonical_goal(start)
    target = resolve_goal(start, goal)
    if target.is_sparse:
        target = target.to_dense()
    check_compatible(start, target)
    return target


def solve_bgsp(board: Board, goal: Goal = None, p: Optional[int] = None, cap: int = DENSE_CAP) -> Plan:
    """二值问题的分治求解, 默认目标为黑格在下的分层局面"""
    plan, _ = solve_bgsp_staged(board, goal, p, cap)
    return plan


def solve_bgsp_staged(board: Board, goal: Goal = None, p: Optional[int] = None,
                      cap: int = DENSE_CAP) -> Tuple[Plan, List[StagePlan]]:
    """同 solve_bgsp, 另外返回各阶段的步骤记账"""
    start = _prepare(board, p, cap)
    if start.k > 2:
        raise UnsupportedError(f"棋盘有 {start.k} 种颜色, 请使用 solve_cgsp")
    return _solve(start, _dense_target(start, goal), default_order(start.k))


def solve_cgsp(board: Board, order: Optional[Sequence[int]] = None, p: Optional[int] = None,
               labeled: bool = False, cap: int = DENSE_CAP) -> Plan:
    """多色问题: 按 order 自底向上分层, 护送格在右上角"""
    if labeled:
        raise UnsupportedError("不支持每个瓦片带唯一标签的置换版本")
    start = _prepare(board, p, cap)
    order = list(order) if order else default_order(start.k)
    target = canonical_goal(start, order)
    if start.k <= 2:
        return solve_bgsp(start, target, p, cap)
    plan, _ = _solve(start, target, order)
    return plan


def _solve(start: DenseBoard, target: DenseBoard, order: List[int]) -> Tuple[Plan, List[StagePlan]]:
    check_compatible(start, target)
    if start.m1 == 1 or start.m2 == 1:
        plan, stages = solve_line(start, target), []
    else:
        native = canonical_goal(start, order)
        plan, stages = _sort(start, native.array, order)
        if target != native:
            # 目标到标准局面的计划取逆后接在后面
            back, back_stages = _sort(target, native.array, order)
            plan = plan.extend(back.inverted())
            for stage in back_stages:
                stage.tag = f"Reverse:{stage.tag}"
            stages = stages + back_stages
    report = validate_plan(start, target, plan)
    if not report.ok:
        raise PlanningError(f"生成的计划未通过校验: {report.kind} {report.message}")
    logger.info("求解 %dx%d k=%d p=%d: makespan %d", start.m2, start.m1, start.k, len(start.escorts), plan.makespan)
    return plan, stages


def _sort(board: DenseBoard, target: np.ndarray, order: List[int]) -> Tuple[Plan, List[StagePlan]]:
    if len(board.escorts) > 1:
        return _sort_strips(board, target, order)
    builder = PlanBuilder(board)
    sort_region(builder, builder.bounds, target, order)
    return builder.plan(), builder.stages


def sort_region(builder: PlanBuilder, region: Box, target: np.ndarray, order: Sequence[int]) -> None:
    """把 region 排成 target, 所有移动都限制在 region 内, 区域内必须恰有一个护送格"""
    if builder.k <= 2:
        sort_binary(builder, region, target)
        return
    _class_passes(builder, region, np.asarray(target, dtype=np.int8), list(order))
    final_drag(builder, target, region)


def _class_passes(builder: PlanBuilder, region: Box, target: np.ndarray, order: List[int]) -> None:
    """按颜色顺序逐色排序

    第 j 轮时前 j-1 种颜色已经按行优先占满区域底部; 先把分界行剩下的格子逐格排好,
    再把第 j 种颜色视为黑色, 其余视为白色, 在分界行以上的区域里跑一遍二值流水线并在真实棋盘上重放
    """
    x1, y1, x2, y2 = region
    placed = 0
    for j, color in enumerate(order[:-1], start=1):
        total = builder.count(color, region)
        if total == 0:
            continue
        q, r = divmod(placed, region.width)
        seam = y1 + q
        if seam > y2 - 1:
            break
        above = Box(x1, seam, x2, y2)
        if r > 0:
            _fill_seam(builder, above, target[seam - y1:, :], x1 + r, order)
            above = Box(x1, seam + 1, x2, y2)
        if above.height < 2:
            break
        view = builder.cells[above.slices()]
        count = int(np.count_nonzero(view == color))
        classes = np.where(builder.cells == ESCORT, ESCORT, np.where(builder.cells == color, BLACK, WHITE))
        sub = PlanBuilder(DenseBoard(classes.astype(np.int8), 2))
        fill = [(BLACK, count), (WHITE, above.width * above.height - 1 - count)]
        sort_binary(sub, above, packed_target(above.height, above.width, fill))
        with builder.stage(f"Class({j})") as stage:
            for step in sub.steps:
                builder.apply(step.shifts)
            for flag in (f for s in sub.stages for f in s.flags):
                if flag not in stage.flags:
                    stage.flags.append(flag)
        placed += total


def _fill_seam(builder: PlanBuilder, box: Box, target: np.ndarray, start: int, order: List[int]) -> None:
    """分界行上 start 左侧已就位, 把其余格子排成目标行, 其上各行只要求计数正确"""
    locked = np.zeros(builder.cells.shape, dtype=bool)
    locked[box.y1 - 1, box.x1 - 1:start - 1] = True
    builder.move_escort((box.x2, box.y2), box, locked)
    row = target[0]
    view = builder.cells[box.slices()]
    fill = [(c, int(np.count_nonzero(view == c)) - int(np.count_nonzero(row == c))) for c in order]
    upper = packed_target(box.height - 1, box.width, fill)
    with builder.stage("Seam"), builder.attributed():
        RegionSorter(builder, box, np.vstack([row[None, :], upper])).run_bottom_row(start)


def solve_line(board: Board, goal: Board) -> Plan:
    """单行或单列棋盘: 瓦片顺序不可改变, 只需把第 i 个护送格移到目标中的第 i 个护送格位置"""
    start = board.to_dense() if board.is_sparse else board
    target = goal.to_dense() if goal.is_sparse else goal
    check_compatible(start, target)
    if start.m1 != 1 and start.m2 != 1:
        raise BoardError("solve_line 只处理单行或单列棋盘")
    line, wanted = start.array.ravel(), target.array.ravel()
    if not np.array_equal(line[line != ESCORT], wanted[wanted != ESCORT]):
        raise IncompatibleInstanceError("单行棋盘上瓦片的相对顺序无法改变")
    axis, index = (Axis.ROW, 1) if start.m1 == 1 else (Axis.COLUMN, 1)
    current = [int(i) + 1 for i in np.flatnonzero(line == ESCORT)]
    goals = [int(i) + 1 for i in np.flatnonzero(wanted == ESCORT)]
    steps: List[Step] = []
    while current != goals:
        shifts, used = [], []
        for i, (a, g) in enumerate(zip(current, goals)):
            if a == g:
                continue
            lo, hi = min(a, g), max(a, g)
            if any(lo <= e <= hi for j, e in enumerate(current) if j != i):
                continue
            if any(lo <= u_hi and u_lo <= hi for u_lo, u_hi in used):
                continue
            used.append((lo, hi))
            shifts.append((i, LineShift(axis=axis, index=index, origin=a, target=g)))
        if not shifts:
            raise PlanningError("单行棋盘上的护送格互相阻挡")
        for i, shift in shifts:
            current[i] = shift.target
        steps.append(Step(shifts=[s for _, s in shifts]))
    return Plan(steps=steps)


# ---- 多护送格: 竖条分区 ----

def strip_boxes(m1: int, m2: int, p: int) -> List[Box]:
    widths = [m2 // p + (1 if j < m2 % p else 0) for j in range(p)]
    boxes, x = [], 1
    for w in widths:
        boxes.append(Box(x, 1, x + w - 1, m1))
        x += w
    return boxes


def _sort_strips(board: DenseBoard, target: np.ndarray, order: List[int]) -> Tuple[Plan, List[StagePlan]]:
    m1, m2 = board.m1, board.m2
    p = len(board.escorts)
    if m1 < 2 or m2 < 2 * p:
        raise UnsupportedError(f"{p} 个护送格需要宽度至少 {2 * p} 且高度至少 2 的棋盘")
    strips = strip_boxes(m1, m2, p)
    builder = PlanBuilder(board)
    with builder.stage("EscortSpread"):
        _distribute(builder, strips)
    staged = _pre_walk_target(target, strips)
    with builder.stage("Balance"), builder.attributed():
        _balance(builder, strips, staged)
    with builder.stage("StripSort") as stage, builder.attributed():
        _parallel_sort(builder, strips, staged, order, stage)
    with builder.stage("EscortWalk"):
        for j in range(p - 2, -1, -1):
            corner = (m2 - (p - 1 - j), m1)
            if (strips[j].x2, m1) != corner:
                builder.jump((strips[j].x2, m1), corner)
    return builder.plan(), builder.stages


def _distribute(builder: PlanBuilder, strips: List[Box]) -> None:
    """按横坐标顺序给每个条带分配一个护送格"""
    positions = sorted(builder.escorts)
    for j, box in enumerate(strips):
        start = positions[j]
        if box.contains(start):
            continue
        x = min(max(start[0], box.x1), box.x2)
        goals = sorted((c for c in box.cells() if c[0] == x and builder.get(c) != ESCORT),
                       key=lambda c: abs(c[1] - start[1]))
        for goal in goals:
            path = builder.route(start, goal, builder.bounds, builder.cells == ESCORT)
            if path is not None:
                builder.walk(path)
                positions[j] = goal
                break
        else:
            raise PlanningError(f"无法把护送格 {start} 送入第 {j + 1} 个条带")


def _pre_walk_target(target: np.ndarray, strips: List[Box]) -> np.ndarray:
    """目标局面在护送格推到角落之前的样子: 每个条带的护送格位于条带右上角"""
    staged = np.array(target, dtype=np.int8, copy=True)
    m1, m2 = staged.shape
    p = len(strips)
    for j, box in enumerate(strips):
        corner = m2 - (p - 1 - j)
        if corner != box.x2:
            apply_shift_inplace(staged, LineShift(axis=Axis.ROW, index=m1, origin=corner, target=box.x2))
    for box in strips:
        if staged[box.y2 - 1, box.x2 - 1] != ESCORT:
            raise PlanningError("目标的护送格不在顶行右端, 无法分条带求解")
    return staged


def _strip_counts(cells: np.ndarray, box: Box, colors: Sequence[int]) -> np.ndarray:
    view = cells[box.slices()]
    return np.array([np.count_nonzero(view == c) for c in colors])


def _balance(builder: PlanBuilder, strips: List[Box], staged: np.ndarray) -> None:
    """相邻条带交换瓦片, 直到每个条带的颜色计数等于其目标计数"""
    colors = [int(c) for c in np.unique(staged) if c != ESCORT]
    wanted = [_strip_counts(staged, box, colors) for box in strips]
    for _ in range(builder.m1 * builder.m2):
        balanced, progress = True, False
        for a in range(len(strips) - 1):
            flow = sum(_strip_counts(builder.cells, strips[j], colors) - wanted[j] for j in range(a + 1))
            if not flow.any():
                continue
            balanced = False
            left = _strip_counts(builder.cells, strips[a], colors)
            right = _strip_counts(builder.cells, strips[a + 1], colors)
            give = [colors[i] for i in range(len(colors)) if flow[i] > 0 and left[i] > 0]
            take = [colors[i] for i in range(len(colors)) if flow[i] < 0 and right[i] > 0]
            if give and take:
                if not _swap_at_boundary(builder, strips[a], strips[a + 1], give[0], take[0]):
                    _exchange(builder, strips[a], strips[a + 1], give[0], take[0])
                progress = True
        if balanced:
            return
        if not progress:
            raise PlanningError("条带之间的颜色计数无法平衡")
    raise PlanningError("条带平衡没有收敛")


def _swap_at_boundary(builder: PlanBuilder, left: Box, right: Box, give: int, take: int) -> bool:
    """边界两侧已经斜对着一对可交换的瓦片时, 只需把右条带的护送格移到它们下方再跳三次"""
    xb = left.x2
    for y in range(1, builder.m1):
        u, u_up, v, v_up = (xb, y), (xb, y + 1), (xb + 1, y), (xb + 1, y + 1)
        if builder.get(u) != give or builder.get(v_up) != take or builder.get(u_up) == ESCORT:
            continue
        locked = np.ones(builder.cells.shape, dtype=bool)
        locked[right.slices()] = False
        locked[v_up[1] - 1, v_up[0] - 1] = True
        try:
            builder.move_escort(v, right, locked)
        except StuckError:
            continue
        builder.jump(v, u)
        builder.jump(u, u_up)
        builder.jump(u_up, v_up)
        return True
    return False


def _nearest_in(builder: PlanBuilder, box: Box, color: int, near: Cell) -> Cell:
    ys, xs = np.nonzero(builder.cells[box.slices()] == color)
    d = np.abs(xs + box.x1 - near[0]) + np.abs(ys + box.y1 - near[1])
    i = int(np.argmin(d))
    return int(xs[i]) + box.x1, int(ys[i]) + box.y1


def _exchange(builder: PlanBuilder, left: Box, right: Box, give: int, take: int) -> None:
    """左条带的一块 give 色瓦片与右条带的一块 take 色瓦片跨边界交换, 护送格各自留在原条带"""
    xb = left.x2
    u, u_up, v, v_up = (xb, 1), (xb, 2), (xb + 1, 1), (xb + 1, 2)
    lock_left = np.ones(builder.cells.shape, dtype=bool)
    lock_left[left.slices()] = False
    lock_right = np.ones(builder.cells.shape, dtype=bool)
    lock_right[right.slices()] = False
    if builder.get(u) != give:
        move_tile(builder, _nearest_in(builder, left, give, u), u, left, lock_left)
    if builder.get(u_up) == ESCORT:
        builder.jump(u_up, (xb - 1, 2))
    if builder.get(v_up) != take:
        move_tile(builder, _nearest_in(builder, right, take, v_up), v_up, right, lock_right)
    lock_right[v_up[1] - 1, v_up[0] - 1] = True
    builder.move_escort(v, right, lock_right)
    builder.jump(v, u)
    builder.jump(u, u_up)
    builder.jump(u_up, v_up)


def _parallel_sort(builder: PlanBuilder, strips: List[Box], staged: np.ndarray, order: List[int],
                   stage: StagePlan) -> None:
    """各条带在自己的区域内独立排序, 再按时间步合并为并行步骤"""
    runs = []
    for box in strips:
        sub = PlanBuilder(builder.board())
        sort_region(sub, box, staged[box.slices()], order)
        runs.append(sub.steps)
        for flag in (f for s in sub.stages for f in s.flags):
            if flag not in stage.flags:
                stage.flags.append(flag)
    for t in range(max(len(r) for r in runs)):
        builder.apply([s for r in runs if t < len(r) for s in r[t].shifts])
