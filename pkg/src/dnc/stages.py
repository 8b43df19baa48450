"""
分治流水线的各个阶段
分散 -> 块内规整 -> 逐层合并 (先横向再纵向) -> 最终拖拽

块和合并出的矩形四周各留一格白边, 黑格按行优先压在内框左下角。
白边是护送格的通道: 护送格只穿过白格时黑格位置不变。横向合并时块下方的白边行是高速路,
纵向合并时块左侧的白边列是高速路, 整行或整列的跳跃可以同时搬动所有配对的黑格
"""

import logging
from collections import defaultdict
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from ..core.board import BLACK, ESCORT, WHITE
from ..core.errors import PlanningError
from ..models.base_models import StagePlan
from .planner import Box, Cell, PlanBuilder, StuckError, move_tile, rotate_ring
from .region import RegionSorter

logger = logging.getLogger(__name__)

BLOCK = 8
SMALL_BOARD = 16
SPREAD_SLACK = 4
DENSE_RATIO = 1 / 9


def _cuts(start: int, length: int, size: int) -> List[int]:
    n = max(1, length // size)
    return [start + i * size for i in range(n)] + [start + length]


class BlockGrid:
    """区域被列边界和行边界切成的矩形网格

    xs 是各列组的起点并以 region.x2 + 1 结尾, ys 同理; 除最后一组外各组等宽 (等高), 最后一组吸收余数
    """

    def __init__(self, region: Box, xs: Sequence[int], ys: Sequence[int]):
        self.region = region
        self.xs = list(xs)
        self.ys = list(ys)

    @classmethod
    def blocks(cls, region: Box, size: int = BLOCK) -> "BlockGrid":
        return cls(region, _cuts(region.x1, region.width, size), _cuts(region.y1, region.height, size))

    @property
    def columns(self) -> int:
        return len(self.xs) - 1

    @property
    def rows(self) -> int:
        return len(self.ys) - 1

    def rect(self, g: int, k: int) -> Box:
        return Box(self.xs[g], self.ys[k], self.xs[g + 1] - 1, self.ys[k + 1] - 1)

    def rects(self) -> Iterator[Box]:
        for k in range(self.rows):
            for g in range(self.columns):
                yield self.rect(g, k)

    def merged_columns(self) -> "BlockGrid":
        return BlockGrid(self.region, self.xs[0:-1:2] + [self.xs[-1]], self.ys)

    def merged_rows(self) -> "BlockGrid":
        return BlockGrid(self.region, self.xs, self.ys[0:-1:2] + [self.ys[-1]])

    def limits(self) -> np.ndarray:
        """每块允许的黑格数: 不超过一半, 且放得进去掉白边的内框"""
        widths = np.diff(self.xs)
        heights = np.diff(self.ys)
        area = np.outer(heights, widths)
        inner = np.outer(heights - 2, widths - 2)
        return np.minimum(area // 2, inner)


def block_counts(cells: np.ndarray, grid: BlockGrid) -> np.ndarray:
    """网格中每块的黑格数, 下标为 [块行, 块列]"""
    view = (cells[grid.region.slices()] == BLACK).astype(np.int32)
    ys = np.array(grid.ys[:-1]) - grid.region.y1
    xs = np.array(grid.xs[:-1]) - grid.region.x1
    return np.add.reduceat(np.add.reduceat(view, ys, axis=0), xs, axis=1)


def density_ok(cells: np.ndarray, grid: BlockGrid) -> bool:
    return bool((block_counts(cells, grid) <= grid.limits()).all())


def packed_mask(height: int, width: int, count: int) -> np.ndarray:
    flat = np.zeros(height * width, dtype=bool)
    flat[:count] = True
    return flat.reshape(height, width)


def is_normal(cells: np.ndarray, rect: Box) -> bool:
    """rect 的白边全白, 黑格按行优先压在内框左下角"""
    view = cells[rect.slices()] == BLACK
    inner = view[1:-1, 1:-1]
    count = int(view.sum())
    if count != int(inner.sum()):
        return False
    return np.array_equal(inner, packed_mask(rect.height - 2, rect.width - 2, count))


def margin_target(rect: Box, count: int) -> np.ndarray:
    """带白边的规整目标, 护送格在 rect 右上角"""
    if count > (rect.height - 2) * (rect.width - 2):
        raise PlanningError(f"矩形 {tuple(rect)} 的内框放不下 {count} 个黑格")
    target = np.full((rect.height, rect.width), WHITE, dtype=np.int8)
    target[1:-1, 1:-1] = np.where(packed_mask(rect.height - 2, rect.width - 2, count), BLACK, WHITE)
    target[-1, -1] = ESCORT
    return target


def is_dense(builder: PlanBuilder, region: Box) -> bool:
    return builder.count(BLACK, region) >= DENSE_RATIO * region.width * region.height


# ---- 护送格移动 ----

def _enter(builder: PlanBuilder, region: Box, cell: Cell, free: Optional[Box] = None) -> None:
    """把护送格送到 cell, 尽量不经过 free 以外的黑格, 这样那些黑格的位置保持不变"""
    blocked = builder.cells == BLACK
    if free is not None:
        blocked[free.slices()] = False
    try:
        builder.move_escort(cell, region, blocked)
    except StuckError:
        builder.move_escort(cell, region, np.zeros(builder.cells.shape, dtype=bool))


def _clear(builder: PlanBuilder, a: Cell, b: Cell) -> bool:
    """a 到 b 的直线段上没有黑格, 也没有别的护送格"""
    if a[1] == b[1]:
        lo, hi = sorted((a[0], b[0]))
        seg = builder.cells[a[1] - 1, lo - 1:hi]
    elif a[0] == b[0]:
        lo, hi = sorted((a[1], b[1]))
        seg = builder.cells[lo - 1:hi, a[0] - 1]
    else:
        return False
    return not (seg == BLACK).any() and int(np.count_nonzero(seg == ESCORT)) <= 1


def _glide(builder: PlanBuilder, region: Box, waypoints: Sequence[Cell]) -> None:
    """沿给定折线把护送格送到最后一个点; 折线经过黑格时改用寻路"""
    pos = builder.escort_in(region)
    legs = []
    for point in waypoints:
        if point == pos:
            continue
        if not (region.contains(point) and _clear(builder, pos, point)):
            _enter(builder, region, waypoints[-1])
            return
        legs.append((pos, point))
        pos = point
    for a, b in legs:
        builder.jump(a, b)


# ---- 第一阶段: 分散 ----

def spread(builder: PlanBuilder, grid: BlockGrid) -> StagePlan:
    """把超过半满的块里多余的黑格搬到最近的有空位的块"""
    with builder.stage("Spread") as stage:
        region = grid.region
        blacks = builder.count(BLACK, region)
        if blacks == 0:
            return stage
        if is_dense(builder, region):
            stage.flags.append("dense")
            return stage
        limits = grid.limits()
        unlocked = np.zeros(builder.cells.shape, dtype=bool)
        with builder.attributed():
            for _ in range(4 * blacks + 16):
                counts = block_counts(builder.cells, grid)
                over = np.argwhere(counts > limits)
                if len(over) == 0:
                    break
                k, g = (int(v) for v in over[0])
                src = _farthest_black(builder, grid.rect(g, k))
                room = np.argwhere(counts < limits - SPREAD_SLACK)
                if len(room) == 0:
                    stage.flags.append("spread-incomplete")
                    break
                dist = np.abs(room[:, 0] - k) + np.abs(room[:, 1] - g)
                tk, tg = (int(v) for v in room[int(np.argmin(dist))])
                dst = _nearest_white(builder, grid.rect(tg, tk), src)
                try:
                    move_tile(builder, src, dst, region, unlocked)
                except StuckError:
                    stage.flags.append("spread-incomplete")
                    break
            else:
                stage.flags.append("spread-incomplete")
        logger.debug("分散阶段结束, 块内最大黑格数 %d", int(block_counts(builder.cells, grid).max()))
    return stage


def _farthest_black(builder: PlanBuilder, box: Box) -> Cell:
    ys, xs = np.nonzero(builder.cells[box.slices()] == BLACK)
    i = int(np.argmax(xs + ys))
    return int(xs[i]) + box.x1, int(ys[i]) + box.y1


def _nearest_white(builder: PlanBuilder, box: Box, near: Cell) -> Cell:
    ys, xs = np.nonzero(builder.cells[box.slices()] == WHITE)
    d = np.abs(xs + box.x1 - near[0]) + np.abs(ys + box.y1 - near[1])
    i = int(np.argmin(d))
    return int(xs[i]) + box.x1, int(ys[i]) + box.y1


# ---- 第二阶段: 块内规整 ----

def normalize8(builder: PlanBuilder, grid: BlockGrid) -> StagePlan:
    """逐块把黑格压进内框左下角, 护送格从顶行起按蛇形顺序经过各块"""
    with builder.stage("Normalize8") as stage:
        for row, k in enumerate(range(grid.rows - 1, -1, -1)):
            columns = range(grid.columns - 1, -1, -1) if row % 2 == 0 else range(grid.columns)
            for g in columns:
                rect = grid.rect(g, k)
                if not is_normal(builder.cells, rect):
                    _resort(builder, grid.region, rect)
    return stage


def _resort(builder: PlanBuilder, region: Box, rect: Box) -> None:
    """逐格把 rect 排成带白边的规整形状"""
    target = margin_target(rect, builder.count(BLACK, rect))
    _enter(builder, region, (rect.x2, rect.y2), rect)
    with builder.attributed():
        RegionSorter(builder, rect, target).run()


def _repair(builder: PlanBuilder, grid: BlockGrid, stage: StagePlan) -> None:
    """合并后仍不规整的矩形逐格重排"""
    for _ in range(2):
        broken = [rect for rect in grid.rects() if not is_normal(builder.cells, rect)]
        if not broken:
            return
        if "highway-fallback" not in stage.flags:
            stage.flags.append("highway-fallback")
        for rect in broken:
            logger.debug("矩形 %s 合并后不规整, 逐格重排", tuple(rect))
            _resort(builder, grid.region, rect)
    if any(not is_normal(builder.cells, rect) for rect in grid.rects()):
        raise PlanningError("合并后的矩形无法恢复规整")


# ---- 第三阶段: 逐层合并 ----

def merge_pass(builder: PlanBuilder, grid: BlockGrid, level: int) -> Tuple[List[StagePlan], BlockGrid]:
    """一层合并: 先把横向相邻的矩形两两合并, 再合并纵向相邻的矩形"""
    stages = []
    if grid.columns > 1:
        stage, grid = merge_rows(builder, grid, level)
        stages.append(stage)
    if grid.rows > 1:
        stage, grid = merge_columns(builder, grid, level)
        stages.append(stage)
    return stages, grid


def merge_rows(builder: PlanBuilder, grid: BlockGrid, level: int) -> Tuple[StagePlan, BlockGrid]:
    merged = grid.merged_columns()
    with builder.stage(f"MergeRows({level})") as stage:
        try:
            _merge_rows(builder, grid)
        except PlanningError as exc:
            logger.debug("横向合并中断: %s", exc)
            stage.flags.append("highway-fallback")
        _repair(builder, merged, stage)
    return stage, merged


def merge_columns(builder: PlanBuilder, grid: BlockGrid, level: int) -> Tuple[StagePlan, BlockGrid]:
    merged = grid.merged_rows()
    with builder.stage(f"MergeCols({level})") as stage:
        try:
            _merge_columns(builder, grid)
        except PlanningError as exc:
            logger.debug("纵向合并中断: %s", exc)
            stage.flags.append("highway-fallback")
        _repair(builder, merged, stage)
    return stage, merged


def _merge_rows(builder: PlanBuilder, grid: BlockGrid) -> None:
    """左块在目标位置, 右块的黑格经下方白边行左移后并入

    两块都只有一行黑格时走高速路: 右块各列整列下拉一格, 黑格落到白边行上,
    各块行的外环同时转 s 格把它们送到左块下方, 再用两行外环并进左块的第一行。其余配对就地合并
    """
    region = grid.region
    sparse: List[Tuple[int, Box, Box, int, int]] = []
    dense: List[Tuple[Box, Box]] = []
    for k in range(grid.rows):
        for g in range(0, grid.columns - 1, 2):
            left, right = grid.rect(g, k), grid.rect(g + 1, k)
            a, b = builder.count(BLACK, left), builder.count(BLACK, right)
            if a <= left.width - 2 and b <= right.width - 2:
                if b > 0:
                    sparse.append((k, left, right, a, b))
            else:
                dense.append((left, right))
    with builder.attributed():
        if sparse:
            need: Dict[int, Set[int]] = defaultdict(set)
            for k, _, right, _, b in sparse:
                for x in range(right.x1 + 1, right.x1 + b + 1):
                    need[x].add(k)
            _drag_columns(builder, grid, need)
            shift = grid.xs[1] - grid.xs[0]
            for k in sorted({k for k, *_ in sparse}):
                ring = Box(region.x1, grid.ys[k], region.x2, grid.ys[k + 1] - 1)
                _glide(builder, region, [(ring.x1, ring.y2)])
                rotate_ring(builder, ring, clockwise=True, turns=shift)
            for _, left, _, a, b in sparse:
                ring = Box(left.x1 + 1, left.y1, left.x1 + a + b + 1, left.y1 + 1)
                _glide(builder, region, [(ring.x2, ring.y2)])
                rotate_ring(builder, ring, clockwise=True, turns=b)
        for left, right in dense:
            _join_rows(builder, region, left, right)


def _segments(need: Set[int], count: int, usable) -> List[Tuple[int, int]]:
    """need 中的编号按连续可用的区间分段, 每段首尾都是需要处理的编号"""
    runs, start, last = [], None, None
    for i in range(count):
        if i in need:
            if start is None:
                start = i
            last = i
        elif not usable(i) and start is not None:
            runs.append((start, last))
            start = None
    if start is not None:
        runs.append((start, last))
    return runs


def _drag_columns(builder: PlanBuilder, grid: BlockGrid, need: Dict[int, Set[int]]) -> None:
    """把右块第一行所在的列整段下拉一格; 相邻块行只要这一列全白就并进同一次跳跃"""
    region = grid.region
    for x in sorted(need):
        g = next(i for i in range(grid.columns) if grid.xs[i] <= x < grid.xs[i + 1])
        lane = grid.xs[g + 1] - 1

        def usable(k: int, x: int = x) -> bool:
            return not (builder.cells[grid.ys[k] - 1:grid.ys[k + 1] - 1, x - 1] == BLACK).any()

        for k1, k2 in _segments(need[x], grid.rows, usable):
            bottom, top = grid.ys[k1], grid.ys[k2 + 1] - 1
            pos = builder.escort_in(region)
            _glide(builder, region, [(lane, pos[1]), (lane, bottom), (x, bottom)])
            builder.jump((x, bottom), (x, top))


def _join_rows(builder: PlanBuilder, region: Box, left: Box, right: Box) -> None:
    """就地合并: 右块每一行左移到紧接左块同一行的黑格之后, 再把各行重新压实"""
    inner = Box(left.x1 + 1, left.y1 + 1, right.x2 - 1, left.y2 - 1)
    lane, top = right.x2, left.y2
    width = left.width - 2
    for y in range(inner.y1, inner.y2 + 1):
        rest = int(np.count_nonzero(builder.cells[y - 1, right.x1:right.x2 - 1] == BLACK))
        if rest == 0:
            break
        have = int(np.count_nonzero(builder.cells[y - 1, left.x1:left.x2 - 1] == BLACK))
        start = (inner.x1 + have, y)
        for _ in range(width - have + 2):
            pos = builder.escort_in(region)
            _glide(builder, region, [(lane, pos[1]), (lane, top), (start[0], top), start])
            builder.jump(start, (lane, y))
    _restack(builder, region, inner, lane)


def _merge_columns(builder: PlanBuilder, grid: BlockGrid) -> None:
    """下块在目标位置, 上块的黑格经左侧白边列下移后并入

    两块都只有一行且放得进一行时走高速路: 上块的一行先转成内框第一列, 各行整段左移一格落到白边列上,
    各列组的外环同时转 s 格把它们送到下块旁边, 再转进下块的第一行。其余配对就地合并
    """
    region = grid.region
    sparse: List[Tuple[int, Box, Box, int, int]] = []
    dense: List[Tuple[Box, Box]] = []
    for g in range(grid.columns):
        for k in range(0, grid.rows - 1, 2):
            lower, upper = grid.rect(g, k), grid.rect(g, k + 1)
            a, c = builder.count(BLACK, lower), builder.count(BLACK, upper)
            if c == 0:
                continue
            width = lower.width - 2
            if a + c <= width and c <= min(lower.height, upper.height) - 2:
                sparse.append((g, lower, upper, a, c))
            else:
                dense.append((lower, upper))
    with builder.attributed():
        if sparse:
            need: Dict[int, Set[int]] = defaultdict(set)
            for g, _, upper, _, c in sparse:
                if c > 1:
                    ring = Box(upper.x1 + 1, upper.y1 + 1, upper.x1 + c, upper.y1 + c)
                    _glide(builder, region, [(ring.x2, ring.y2)])
                    rotate_ring(builder, ring, clockwise=True, turns=c - 1)
                for y in range(upper.y1 + 1, upper.y1 + c + 1):
                    need[y].add(g)
            _drag_rows(builder, grid, need)
            shift = grid.ys[1] - grid.ys[0]
            for g in sorted({g for g, *_ in sparse}):
                ring = Box(grid.xs[g], region.y1, grid.xs[g + 1] - 1, region.y2)
                _glide(builder, region, [(ring.x2, ring.y1)])
                rotate_ring(builder, ring, clockwise=False, turns=shift)
            for _, lower, _, a, c in sparse:
                _absorb_column(builder, region, lower, a, c)
        for lower, upper in dense:
            inner = Box(lower.x1 + 1, lower.y1 + 1, lower.x2 - 1, upper.y2 - 1)
            _restack(builder, region, inner, lower.x2)


def _drag_rows(builder: PlanBuilder, grid: BlockGrid, need: Dict[int, Set[int]]) -> None:
    """把上块第一列所在的行整段左移一格, 自下而上逐行处理"""
    region = grid.region
    for y in sorted(need):
        k = next(i for i in range(grid.rows) if grid.ys[i] <= y < grid.ys[i + 1])
        top = grid.ys[k + 1] - 1

        def usable(g: int, y: int = y) -> bool:
            return not (builder.cells[y - 1, grid.xs[g] - 1:grid.xs[g + 1] - 1] == BLACK).any()

        for g1, g2 in _segments(need[y], grid.columns, usable):
            left, right = grid.xs[g1], grid.xs[g2 + 1] - 1
            pos = builder.escort_in(region)
            _glide(builder, region, [(pos[0], top), (left, top), (left, y)])
            builder.jump((left, y), (right, y))


def _absorb_column(builder: PlanBuilder, region: Box, lower: Box, a: int, c: int) -> None:
    """白边列上的 c 个黑格并进下块第一行, 接在已有的 a 个之后"""
    y = lower.y1 + 1
    if c == 1:
        _glide(builder, region, [(lower.x1 + a + 1, y)])
        builder.jump((lower.x1 + a + 1, y), (lower.x1, y))
        return
    ring = Box(lower.x1, y, lower.x1 + a + c, y + c - 1)
    _glide(builder, region, [(ring.x2, ring.y2)])
    rotate_ring(builder, ring, clockwise=False, turns=c)


# ---- 行的压实 ----

def _row_length(builder: PlanBuilder, box: Box, y: int) -> int:
    return int(np.count_nonzero(builder.cells[y - 1, box.x1 - 1:box.x2] == BLACK))


def _restack(builder: PlanBuilder, region: Box, box: Box, lane: int) -> None:
    """box 内每行都是从左端起的黑格前缀, 把它们压成行优先的一堆

    空行上方的一行用高外环整行放下, 相邻两行用两行外环把上一行的黑格拉进下一行;
    外环的右边取 lane 列, 护送格停在外环右上角, 所以那里不能是黑格
    """
    width = box.width
    lengths = {y: _row_length(builder, box, y) for y in range(box.y1, box.y2 + 1)}
    y = box.y1
    while y <= box.y2:
        if lengths[y] >= width:
            y += 1
            continue
        above = [z for z in range(y + 1, box.y2 + 1) if lengths[z] > 0]
        if not above:
            return
        z = above[0]
        dst = y if lengths[y] == 0 else y + 1
        if z > dst:
            _lower_row(builder, region, box.x1, lane, z, dst, lengths[z])
            lengths[dst], lengths[z] = lengths[z], 0
        if dst == y:
            continue
        d = min(width - lengths[y], lengths[y + 1])
        ring = Box(box.x1, y, lane, y + 1)
        _glide(builder, region, [(lane, y + 1)])
        rotate_ring(builder, ring, clockwise=False, turns=d)
        lengths[y] += d
        lengths[y + 1] -= d


def _lower_row(builder: PlanBuilder, region: Box, x1: int, lane: int, z: int, dst: int, n: int) -> None:
    """第 z 行的 n 个前缀黑格沿外环的左边放到第 dst 行, 中间各行必须为空"""
    ring = Box(x1, dst, lane, z)
    _glide(builder, region, [(lane, z)])
    rotate_ring(builder, ring, clockwise=False, turns=n + z - dst - 1)


# ---- 第四阶段: 最终拖拽 ----

def final_drag(builder: PlanBuilder, target: np.ndarray, region: Optional[Box] = None) -> StagePlan:
    """规整的整块先整行左移, 再整列下移, 最后压实到区域左下角; 与目标不符的部分逐格排序"""
    region = region or builder.bounds
    target = np.asarray(target, dtype=np.int8)
    with builder.stage("FinalDrag") as stage:
        with builder.attributed():
            if builder.k <= 2 and builder.count(BLACK, region) > 0 and is_normal(builder.cells, region):
                try:
                    _settle(builder, region)
                except PlanningError as exc:
                    logger.debug("整行整列拖拽中断: %s", exc)
                    stage.flags.append("drag-fallback")
            _finish(builder, region, target)
    return stage


def _settle(builder: PlanBuilder, region: Box) -> None:
    x1, y1, x2, y2 = region
    rows = [y for y in range(y1 + 1, y2) if _row_length(builder, region, y) > 0]
    for y in rows:
        pos = builder.escort_in(region)
        _glide(builder, region, [(x2, pos[1]), (x2, y2), (x1, y2), (x1, y)])
        builder.jump((x1, y), (x2, y))
    columns = [x for x in range(x1, x2 + 1) if (builder.cells[y1:y2 - 1, x - 1] == BLACK).any()]
    for x in columns:
        pos = builder.escort_in(region)
        _glide(builder, region, [(pos[0], y2), (x2, y2), (x2, y1), (x, y1)])
        builder.jump((x, y1), (x, y2))
    _restack(builder, region, Box(x1, y1, x2, y2), x2)
    _glide(builder, region, [(x2, y2)])


def _finish(builder: PlanBuilder, region: Box, target: np.ndarray) -> None:
    """从第一个与目标不符的行开始, 对其上的整段做逐格排序"""
    diff = np.nonzero((builder.cells[region.slices()] != target).any(axis=1))[0]
    if len(diff) == 0:
        return
    y = min(region.y1 + int(diff[0]), region.y2 - 1)
    box = Box(region.x1, y, region.x2, region.y2)
    logger.debug("最终逐格排序 %s", tuple(box))
    RegionSorter(builder, box, target[y - region.y1:, :]).run()


def sort_binary(builder: PlanBuilder, region: Box, target: np.ndarray) -> None:
    """二值区域的完整流水线, 目标为区域内的行优先打包局面"""
    if min(region.width, region.height) < SMALL_BOARD:
        with builder.stage("Spread") as stage:
            stage.flags.append("small-board")
        final_drag(builder, target, region)
        return
    grid = BlockGrid.blocks(region)
    flags = spread(builder, grid).flags
    if builder.count(BLACK, region) > 0 and not {"dense", "spread-incomplete"} & set(flags):
        try:
            normalize8(builder, grid)
            level = 4
            while grid.columns > 1 or grid.rows > 1:
                _, grid = merge_pass(builder, grid, level)
                level += 1
        except PlanningError as exc:
            logger.warning("区域 %s 的合并失败, 改为逐格排序: %s", tuple(region), exc)
            if "highway-fallback" not in builder.stages[-1].flags:
                builder.stages[-1].flags.append("highway-fallback")
    final_drag(builder, target, region)
