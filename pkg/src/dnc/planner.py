"""
规划工作区与基本操作
PlanBuilder 在可变的模拟棋盘上逐个校验并记录线移动; 其余函数是各阶段共用的搬运原语:
护送格寻路, 单瓦片搬运, 矩形外环旋转, 小窗口内的颜色搜索
"""

import logging
from collections import deque
from contextlib import contextmanager
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..core.board import BLACK, ESCORT, DenseBoard, apply_shift_inplace
from ..core.errors import PlanningError
from ..core.moves import validate_step_array
from ..models.base_models import Axis, LineShift, Plan, StagePlan, Step

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]
DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1))


class StuckError(PlanningError):
    """局部操作无解, 由调用方换用更宽的窗口或别的策略"""


class Box(NamedTuple):
    """闭区间矩形 [x1, x2] x [y1, y2]"""
    x1: int
    y1: int
    x2: int
    y2: int

    @property
    def width(self) -> int:
        return self.x2 - self.x1 + 1

    @property
    def height(self) -> int:
        return self.y2 - self.y1 + 1

    def contains(self, cell: Cell) -> bool:
        return self.x1 <= cell[0] <= self.x2 and self.y1 <= cell[1] <= self.y2

    def clip(self, other: "Box") -> "Box":
        return Box(max(self.x1, other.x1), max(self.y1, other.y1), min(self.x2, other.x2), min(self.y2, other.y2))

    def grow(self, margin: int) -> "Box":
        return Box(self.x1 - margin, self.y1 - margin, self.x2 + margin, self.y2 + margin)

    def slices(self) -> Tuple[slice, slice]:
        """对应 [y-1, x-1] 下标的数组切片"""
        return slice(self.y1 - 1, self.y2), slice(self.x1 - 1, self.x2)

    def cells(self) -> List[Cell]:
        return [(x, y) for y in range(self.y1, self.y2 + 1) for x in range(self.x1, self.x2 + 1)]

    @classmethod
    def around(cls, *cells: Cell) -> "Box":
        xs = [c[0] for c in cells]
        ys = [c[1] for c in cells]
        return cls(min(xs), min(ys), max(xs), max(ys))


def manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


class PlanBuilder:
    """可变的规划工作区

    每个步骤先在模拟棋盘上校验, 再原地执行并记录; 阶段内的步骤同时计入对应的 StagePlan
    """

    def __init__(self, board: DenseBoard):
        self.cells = board.array.copy()
        self.k = board.k
        self.m1, self.m2 = self.cells.shape
        self.steps: List[Step] = []
        self.stages: List[StagePlan] = []
        self._stage: Optional[StagePlan] = None
        self._attributed = False

    @property
    def bounds(self) -> Box:
        return Box(1, 1, self.m2, self.m1)

    def get(self, cell: Cell) -> int:
        return int(self.cells[cell[1] - 1, cell[0] - 1])

    @property
    def escorts(self) -> List[Cell]:
        ys, xs = np.nonzero(self.cells == ESCORT)
        return sorted((int(x) + 1, int(y) + 1) for x, y in zip(xs, ys))

    def escort_in(self, box: Box) -> Cell:
        """box 内唯一的护送格"""
        ys, xs = np.nonzero(self.cells[box.slices()] == ESCORT)
        if len(xs) != 1:
            raise PlanningError(f"区域 {tuple(box)} 内应恰有一个护送格, 实际 {len(xs)} 个")
        return int(xs[0]) + box.x1, int(ys[0]) + box.y1

    def count(self, color: int, box: Optional[Box] = None) -> int:
        view = self.cells if box is None else self.cells[box.slices()]
        return int(np.count_nonzero(view == color))

    def board(self) -> DenseBoard:
        return DenseBoard(self.cells, self.k)

    def plan(self) -> Plan:
        return Plan(steps=list(self.steps))

    # ---- 记账 ----
    @contextmanager
    def stage(self, tag: str) -> Iterator[StagePlan]:
        current = StagePlan(tag=tag, blacks=self.count(BLACK))
        self._stage = current
        try:
            yield current
        finally:
            self._stage = None
            self.stages.append(current)
            logger.debug("阶段 %s: %d 步", tag, len(current.steps))

    @contextmanager
    def attributed(self) -> Iterator[None]:
        """其中记录的步骤归因到黑格搬运"""
        previous = self._attributed
        self._attributed = True
        try:
            yield
        finally:
            self._attributed = previous

    # ---- 执行 ----
    def apply(self, shifts: Sequence[LineShift]) -> None:
        step = Step(shifts=list(shifts))
        report = validate_step_array(self.cells, step)
        if not report.ok:
            raise PlanningError(f"生成了非法步骤: {report.message}")
        for shift in step.shifts:
            apply_shift_inplace(self.cells, shift)
        self.steps.append(step)
        if self._stage is not None:
            self._stage.add_steps([step], self._attributed)

    def jump(self, src: Cell, dst: Cell) -> None:
        """护送格从 src 沿行或列跳到 dst"""
        if src[1] == dst[1]:
            shift = LineShift(axis=Axis.ROW, index=src[1], origin=src[0], target=dst[0])
        elif src[0] == dst[0]:
            shift = LineShift(axis=Axis.COLUMN, index=src[0], origin=src[1], target=dst[1])
        else:
            raise PlanningError(f"{src} 与 {dst} 不在同一行或同一列")
        self.apply([shift])

    def walk(self, path: Sequence[Cell]) -> None:
        """沿单位路径移动护送格, 同方向的连续单位移动合并为一次跳跃"""
        i = 0
        while i < len(path) - 1:
            d = (path[i + 1][0] - path[i][0], path[i + 1][1] - path[i][1])
            j = i + 1
            while j + 1 < len(path) and (path[j + 1][0] - path[j][0], path[j + 1][1] - path[j][1]) == d:
                j += 1
            self.jump(path[i], path[j])
            i = j

    def route(self, start: Cell, goal: Cell, region: Box, blocked: np.ndarray,
              avoid: Sequence[Cell] = ()) -> Optional[List[Cell]]:
        """在 region 内寻找少转弯的路径, 先在两端附近的小窗口里找, 失败再逐步放大"""
        for margin in (2, 8, None):
            window = region if margin is None else Box.around(start, goal).grow(margin).clip(region)
            path = find_route(blocked, start, goal, window, avoid)
            if path is not None or window == region:
                return path
        return None

    def move_escort(self, goal: Cell, region: Box, blocked: np.ndarray, avoid: Sequence[Cell] = ()) -> None:
        start = self.escort_in(region)
        if start == goal:
            return
        path = self.route(start, goal, region, blocked | (self.cells == ESCORT), avoid)
        if path is None:
            raise StuckError(f"护送格无法从 {start} 到达 {goal}")
        self.walk(path)


def find_route(blocked: np.ndarray, start: Cell, goal: Cell, window: Box,
               avoid: Sequence[Cell] = ()) -> Optional[List[Cell]]:
    """0-1 BFS: 直行不计代价, 每次转弯计 1; 返回含两端的单位路径, 起点本身不受 blocked 限制"""
    if start == goal:
        return [start]
    if not (window.contains(start) and window.contains(goal)):
        return None
    grid = blocked[window.slices()].tolist()
    for cell in avoid:
        if window.contains(cell):
            grid[cell[1] - window.y1][cell[0] - window.x1] = True
    w, h = window.width, window.height
    sx, sy = start[0] - window.x1, start[1] - window.y1
    gx, gy = goal[0] - window.x1, goal[1] - window.y1
    if grid[gy][gx]:
        return None
    first = (sx, sy, -1)
    dist: Dict[tuple, int] = {first: 0}
    parent: Dict[tuple, tuple] = {}
    queue = deque([first])
    while queue:
        state = queue.popleft()
        x, y, d = state
        if x == gx and y == gy:
            path = []
            while state != first:
                path.append((state[0] + window.x1, state[1] + window.y1))
                state = parent[state]
            path.append(start)
            return path[::-1]
        base = dist[state]
        for nd, (dx, dy) in enumerate(DIRECTIONS):
            nx, ny = x + dx, y + dy
            if not (0 <= nx < w and 0 <= ny < h) or grid[ny][nx]:
                continue
            cost = base + (0 if nd == d else 1)
            nxt = (nx, ny, nd)
            if cost < dist.get(nxt, cost + 1):
                dist[nxt] = cost
                parent[nxt] = state
                if nd == d:
                    queue.appendleft(nxt)
                else:
                    queue.append(nxt)
    return None


def joint_route(blocked: np.ndarray, tile: Cell, escort: Cell, dst: Cell, window: Box,
                max_states: int = 200_000) -> Optional[List[Cell]]:
    """在 (瓦片, 护送格) 联合状态上做 BFS, 返回把瓦片送到 dst 的护送格单位路径"""
    if tile == dst:
        return [escort]
    if not (window.contains(tile) and window.contains(escort) and window.contains(dst)):
        return None
    grid = blocked[window.slices()].tolist()

    def free(cell: Cell) -> bool:
        return window.contains(cell) and not grid[cell[1] - window.y1][cell[0] - window.x1]

    first = (tile, escort)
    parent: Dict[tuple, Optional[tuple]] = {first: None}
    queue = deque([first])
    while queue:
        state = queue.popleft()
        t, e = state
        if t == dst:
            path = []
            while state is not None:
                path.append(state[1])
                state = parent[state]
            return path[::-1]
        for dx, dy in DIRECTIONS:
            n = (e[0] + dx, e[1] + dy)
            if not free(n):
                continue
            nxt = (e if n == t else t, n)
            if nxt in parent:
                continue
            parent[nxt] = state
            if len(parent) > max_states:
                return None
            queue.append(nxt)
    return None


def move_tile(builder: PlanBuilder, src: Cell, dst: Cell, region: Box, locked: np.ndarray) -> None:
    """把 src 处的瓦片搬到 dst

    护送格与瓦片都只在 region 内的未锁定格子上移动; 贪心推进失败或出现循环时改用联合状态搜索
    """
    pos = src
    seen = set()
    while pos != dst:
        escort = builder.escort_in(region)
        if (pos, escort) in seen:
            break
        seen.add((pos, escort))
        path = builder.route(pos, dst, region, locked)
        if path is None:
            raise StuckError(f"瓦片无法从 {pos} 到达 {dst}")
        nxt = path[1]
        if escort != nxt:
            route = builder.route(escort, nxt, region, locked, avoid=(pos,))
            if route is None:
                break
            builder.walk(route)
        builder.jump(nxt, pos)
        pos = nxt
    if pos == dst:
        return
    escort = builder.escort_in(region)
    for margin in (2, 4):
        window = Box.around(pos, dst, escort).grow(margin).clip(region)
        path = joint_route(locked, pos, escort, dst, window)
        if path is not None:
            builder.walk(path)
            return
    raise StuckError(f"瓦片无法从 {pos} 搬到 {dst}")


def rotate_ring(builder: PlanBuilder, box: Box, clockwise: bool, turns: int = 1) -> None:
    """把矩形外环上的瓦片整体转动 turns 格, 每格 4 步; 护送格必须位于某个角上并最终回到原角"""
    if box.width < 2 or box.height < 2:
        raise PlanningError("外环旋转需要至少 2x2 的矩形")
    tl, bl, br, tr = (box.x1, box.y2), (box.x1, box.y1), (box.x2, box.y1), (box.x2, box.y2)
    # 瓦片顺时针转动时护送格逆时针绕行
    travel = [tl, bl, br, tr] if clockwise else [tl, tr, br, bl]
    corner = next((c for c in travel if builder.get(c) == ESCORT), None)
    if corner is None:
        raise PlanningError(f"护送格不在矩形 {tuple(box)} 的角上")
    start = travel.index(corner)
    for _ in range(turns):
        for i in range(4):
            builder.jump(travel[(start + i) % 4], travel[(start + i + 1) % 4])


def window_search(builder: PlanBuilder, window: Sequence[Cell], required: Dict[Cell, int],
                  max_states: int = 300_000) -> Optional[List[Tuple[Cell, Cell]]]:
    """在小窗口内按颜色做 BFS, 使 required 中的格子取到指定颜色

    窗口内必须恰有一个护送格; 动作为沿窗口内连续格子的任意长度跳跃, 返回跳跃序列
    """
    window = list(window)
    index = {cell: i for i, cell in enumerate(window)}
    start = tuple(builder.get(c) for c in window)
    if start.count(ESCORT) != 1:
        return None
    rays = []
    for cell in window:
        per_cell = []
        for dx, dy in DIRECTIONS:
            ray = []
            n = (cell[0] + dx, cell[1] + dy)
            while n in index:
                ray.append(index[n])
                n = (n[0] + dx, n[1] + dy)
            if ray:
                per_cell.append(ray)
        rays.append(per_cell)
    goal = [(index[c], v) for c, v in required.items()]

    def done(state: tuple) -> bool:
        return all(state[i] == v for i, v in goal)

    if done(start):
        return []
    parent: Dict[tuple, Optional[tuple]] = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        e = state.index(ESCORT)
        for ray in rays[e]:
            cur = list(state)
            prev = e
            for j in ray:
                cur[prev] = cur[j]
                cur[j] = ESCORT
                prev = j
                nxt = tuple(cur)
                if nxt in parent:
                    continue
                parent[nxt] = (state, e, j)
                if done(nxt):
                    jumps = []
                    while parent[nxt] is not None:
                        nxt, a, b = parent[nxt]
                        jumps.append((window[a], window[b]))
                    return jumps[::-1]
                if len(parent) > max_states:
                    return None
                queue.append(nxt)
    return None
