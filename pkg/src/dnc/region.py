"""
矩形区域排序
逐行自下而上把每个格子换成目标颜色; 行末两格与顶部两行用三步换位完成, 最后的窄条带用小窗口搜索收尾
"""

import logging
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.board import ESCORT
from ..core.errors import PlanningError
from .planner import Box, Cell, PlanBuilder, StuckError, manhattan, move_tile, window_search

logger = logging.getLogger(__name__)


def packed_target(height: int, width: int, fill: Sequence[Tuple[int, int]]) -> np.ndarray:
    """按 (颜色, 个数) 顺序自底向上逐行填充, 护送格在右上角"""
    parts = [np.full(n, color, dtype=np.int8) for color, n in fill if n > 0]
    flat = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int8)
    if len(flat) != height * width - 1:
        raise PlanningError(f"填充数量 {len(flat)} 与区域 {width}x{height} 不符")
    return np.append(flat, np.int8(ESCORT)).reshape(height, width)


class RegionSorter:
    """把矩形区域重排成给定目标, 目标的护送格必须在区域右上角

    区域外的格子全部视为锁定; 已就位的格子随后也被锁定
    """

    def __init__(self, builder: PlanBuilder, box: Box, target: np.ndarray):
        target = np.asarray(target, dtype=np.int8)
        if target.shape != (box.height, box.width):
            raise PlanningError(f"目标形状 {target.shape} 与区域 {box.width}x{box.height} 不符")
        if box.width < 2 or box.height < 2:
            raise PlanningError("区域至少需要 2x2")
        if target[-1, -1] != ESCORT or np.count_nonzero(target == ESCORT) != 1:
            raise PlanningError("目标必须恰有一个护送格且位于右上角")
        current = builder.cells[box.slices()]
        size = max(int(current.max()), int(target.max())) + 1
        if not np.array_equal(np.bincount(current.ravel(), minlength=size),
                              np.bincount(target.ravel(), minlength=size)):
            raise PlanningError(f"区域 {tuple(box)} 的颜色计数与目标不一致")
        self.builder = builder
        self.box = box
        self.target = target
        self.locked = np.ones(builder.cells.shape, dtype=bool)
        self.locked[box.slices()] = False

    def want(self, cell: Cell) -> int:
        return int(self.target[cell[1] - self.box.y1, cell[0] - self.box.x1])

    def _lock(self, *cells: Cell) -> None:
        for x, y in cells:
            self.locked[y - 1, x - 1] = True

    def _unlock(self, *cells: Cell) -> None:
        for x, y in cells:
            self.locked[y - 1, x - 1] = False

    def _nearest(self, color: int, near: Cell, exclude: Sequence[Cell] = ()) -> Optional[Cell]:
        box = self.box
        mask = (self.builder.cells[box.slices()] == color) & ~self.locked[box.slices()]
        for x, y in exclude:
            if box.contains((x, y)):
                mask[y - box.y1, x - box.x1] = False
        ys, xs = np.nonzero(mask)
        if len(xs) == 0:
            return None
        d = np.abs(xs + box.x1 - near[0]) + np.abs(ys + box.y1 - near[1])
        i = int(np.argmin(d))
        return int(xs[i]) + box.x1, int(ys[i]) + box.y1

    def run(self) -> None:
        x1, y1, x2, y2 = self.box
        for y in range(y1, y2 - 1):
            if self._finish_if_uniform():
                return
            for x in range(x1, x2 - 1):
                self._place((x, y))
            self._place_row_pair(y)
        for x in range(x1, x2 - 3):
            if self._finish_if_uniform():
                return
            self._place_column_pair(x)
        self._finish_strip()

    def run_bottom_row(self, start: int) -> None:
        """只排好底行中横坐标不小于 start 的格子, 其左侧的格子视为已就位"""
        x1, y1, x2, _ = self.box
        start = min(max(start, x1), x2 - 1)
        self._lock(*((x, y1) for x in range(x1, start)))
        for x in range(start, x2 - 1):
            self._place((x, y1))
        self._place_row_pair(y1)

    def _finish_if_uniform(self) -> bool:
        """剩余未锁定瓦片同色时只需把护送格送到右上角"""
        view = self.builder.cells[self.box.slices()]
        free = ~self.locked[self.box.slices()]
        if len(np.unique(view[free & (view != ESCORT)])) > 1:
            return False
        self.builder.move_escort((self.box.x2, self.box.y2), self.box, self.locked)
        self.locked[self.box.slices()] = True
        return True

    def _place(self, cell: Cell) -> None:
        color = self.want(cell)
        if self.builder.get(cell) != color:
            src = self._nearest(color, cell)
            if src is None:
                raise PlanningError(f"区域内找不到颜色 {color} 的空闲瓦片")
            move_tile(self.builder, src, cell, self.box, self.locked)
        self._lock(cell)

    def _place_row_pair(self, y: int) -> None:
        x2 = self.box.x2
        inner, end, extra = (x2 - 1, y), (x2, y), (x2, y + 1)
        windows = [Box(x2 - 2, y, x2, y + 2), Box(x2 - 3, y, x2, y + 3)]
        self._place_pair(inner, end, extra, windows)

    def _place_column_pair(self, x: int) -> None:
        y2 = self.box.y2
        inner, end, extra = (x, y2 - 1), (x, y2), (x + 1, y2)
        windows = [Box(x, y2 - 1, x + 2, y2), Box(x, y2 - 1, x + 3, y2)]
        self._place_pair(inner, end, extra, windows)

    def _place_pair(self, inner: Cell, end: Cell, extra: Cell, windows: List[Box]) -> None:
        """边界上的两格: inner 的颜色先放到 end, end 的颜色放到 extra, 再用两次跳跃归位"""
        want_inner, want_end = self.want(inner), self.want(end)
        b = self.builder
        if b.get(inner) == want_inner and b.get(end) == want_end:
            self._lock(inner, end)
            return
        held: List[Cell] = []
        try:
            if b.get(end) != want_inner:
                src = self._nearest(want_inner, end)
                if src is None:
                    raise StuckError("缺少 inner 颜色")
                move_tile(b, src, end, self.box, self.locked)
            self._lock(end)
            held.append(end)
            if b.get(extra) != want_end:
                src = self._nearest(want_end, extra, exclude=(inner,))
                if src is None:
                    raise StuckError("缺少 end 颜色")
                move_tile(b, src, extra, self.box, self.locked)
            self._lock(extra)
            held.append(extra)
            b.move_escort(inner, self.box, self.locked)
        except StuckError as exc:
            self._unlock(*held)
            logger.debug("换位失败 (%s), 改用窗口搜索 %s", exc, inner)
            self._search({inner: want_inner, end: want_end}, windows)
            return
        self._unlock(*held)
        b.jump(inner, end)
        b.jump(end, extra)
        self._lock(inner, end)

    def _search(self, required: Dict[Cell, int], windows: List[Box]) -> None:
        for box in windows:
            window = [c for c in box.clip(self.box).cells() if not self.locked[c[1] - 1, c[0] - 1]]
            if not self._gather(window, required):
                continue
            jumps = window_search(self.builder, window, required)
            if jumps is None:
                continue
            for src, dst in jumps:
                self.builder.jump(src, dst)
            self._lock(*required)
            return
        raise PlanningError(f"窗口搜索无法放置 {sorted(required)}")

    def _gather(self, window: List[Cell], required: Dict[Cell, int]) -> bool:
        """把所需颜色的瓦片和护送格聚到窗口内"""
        b = self.builder
        inside = set(window)
        need = Counter(required.values())
        for _ in range(2 * len(required) + 2):
            escort = b.escort_in(self.box)
            if escort not in inside:
                try:
                    b.move_escort(min(window, key=lambda c: manhattan(c, escort)), self.box, self.locked)
                except StuckError:
                    return False
            have = Counter(b.get(c) for c in window if b.get(c) != ESCORT)
            missing = [color for color, n in need.items() if have[color] < n]
            if not missing:
                return True
            spare = [c for c in window
                     if b.get(c) != ESCORT and have[b.get(c)] > need.get(b.get(c), 0)]
            if not spare:
                return False
            spare.sort(key=lambda c: c in required)
            src = self._nearest(missing[0], spare[0], exclude=window)
            if src is None:
                return False
            try:
                move_tile(b, src, spare[0], self.box, self.locked)
            except StuckError:
                return False
        return False

    def _finish_strip(self) -> None:
        x1, y1, x2, y2 = self.box
        for width in (4, 6):
            strip = Box(max(x1, x2 - width + 1), y2 - 1, x2, y2)
            self._unlock(*strip.cells())
            window = strip.cells()
            self.builder.move_escort(min(window, key=lambda c: manhattan(c, self.builder.escort_in(self.box))),
                                     self.box, self.locked)
            jumps = window_search(self.builder, window, {c: self.want(c) for c in window})
            if jumps is not None:
                for src, dst in jumps:
                    self.builder.jump(src, dst)
                self._lock(*window)
                return
            if strip.x1 == x1:
                break
        raise PlanningError(f"区域 {tuple(self.box)} 的末端条带无法排好")
