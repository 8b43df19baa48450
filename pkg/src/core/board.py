"""
棋盘表示
坐标约定: x 为列 (1 为最左), y 为行 (1 为最底); 0 表示护送格, 1..k 表示颜色
DenseBoard 用 numpy 数组保存全部格子, SparseBoard 用行带 + 游程编码保存超大棋盘
"""

import bisect
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..models.base_models import Axis, LineShift
from .errors import BoardError

logger = logging.getLogger(__name__)

ESCORT = 0
WHITE = 1
BLACK = 2

Cell = Tuple[int, int]
Rect = Tuple[int, int, int, int, int]  # x1, y1, x2, y2, value


class DenseBoard:
    """稠密棋盘, 数组下标为 [y-1, x-1]"""

    is_sparse = False

    def __init__(self, cells: np.ndarray, k: int):
        cells = np.array(cells, dtype=np.int8)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise BoardError("棋盘必须是非空的二维网格")
        if k < 1:
            raise BoardError("颜色数 k 必须至少为 1")
        if cells.min() < 0 or cells.max() > k:
            raise BoardError(f"格子取值必须在 0..{k} 之间")
        if not (cells == ESCORT).any():
            raise BoardError("棋盘至少需要一个护送格")
        self._cells = cells
        self._cells.setflags(write=False)
        self.k = int(k)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], k: Optional[int] = None) -> "DenseBoard":
        """按自顶向下的行构造"""
        arr = np.array(list(reversed([list(r) for r in rows])), dtype=np.int8)
        return cls(arr, k if k is not None else max(1, int(arr.max())))

    @property
    def m1(self) -> int:
        return int(self._cells.shape[0])

    @property
    def m2(self) -> int:
        return int(self._cells.shape[1])

    @property
    def array(self) -> np.ndarray:
        """只读数组视图"""
        return self._cells

    def get(self, x: int, y: int) -> int:
        if not (1 <= x <= self.m2 and 1 <= y <= self.m1):
            raise BoardError(f"坐标 ({x},{y}) 超出 {self.m2}x{self.m1} 棋盘")
        return int(self._cells[y - 1, x - 1])

    @property
    def escorts(self) -> List[Cell]:
        ys, xs = np.nonzero(self._cells == ESCORT)
        return sorted((int(x) + 1, int(y) + 1) for y, x in zip(ys, xs))

    def histogram(self) -> Dict[int, int]:
        values, counts = np.unique(self._cells, return_counts=True)
        hist = {c: 0 for c in range(0, self.k + 1)}
        hist.update({int(v): int(n) for v, n in zip(values, counts)})
        return hist

    def with_shifts(self, shifts: Iterable[LineShift]) -> "DenseBoard":
        cells = self._cells.copy()
        for shift in shifts:
            apply_shift_inplace(cells, shift)
        return DenseBoard(cells, self.k)

    def to_sparse(self, default: Optional[int] = None) -> "SparseBoard":
        bands = []
        for y in range(1, self.m1 + 1):
            xs, vals = _runs_from_row(self._cells[y - 1])
            if bands and bands[-1][2] == xs and bands[-1][3] == vals:
                lo, _, bxs, bvals = bands[-1]
                bands[-1] = (lo, y, bxs, bvals)
            else:
                bands.append((y, y, xs, vals))
        if default is None:
            hist = self.histogram()
            default = max(range(1, self.k + 1), key=lambda c: (hist.get(c, 0), -c))
        return SparseBoard(self.m1, self.m2, self.k, bands, default=default)

    def to_dense(self, cap: Optional[int] = None) -> "DenseBoard":
        return self

    def window(self, x1: int, y1: int, x2: int, y2: int) -> np.ndarray:
        return self._cells[y1 - 1:y2, x1 - 1:x2].copy()

    def __eq__(self, other) -> bool:
        return boards_equal(self, other)

    def __hash__(self) -> int:
        return hash(self._cells.tobytes())

    def __repr__(self) -> str:
        return f"DenseBoard({self.m1}x{self.m2}, k={self.k}, p={len(self.escorts)})"


def apply_shift_inplace(cells: np.ndarray, shift: LineShift) -> None:
    """在数组上原地执行一次 (已校验的) 线移动"""
    a, b = shift.origin, shift.target
    line = cells[shift.index - 1, :] if shift.axis == Axis.ROW else cells[:, shift.index - 1]
    if a < b:
        line[a - 1:b - 1] = line[a:b].copy()
    else:
        line[b:a] = line[b - 1:a - 1].copy()
    line[b - 1] = ESCORT


def _runs_from_row(row: np.ndarray) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    row = np.asarray(row)
    change = np.flatnonzero(row[1:] != row[:-1]) + 1
    starts = np.concatenate(([0], change))
    return tuple(int(s) + 1 for s in starts), tuple(int(row[s]) for s in starts)


def _segments(xs: Sequence[int], vals: Sequence[int], m2: int, lo: int, hi: int) -> List[Tuple[int, int]]:
    """取出行中 [lo, hi] 区间, 返回 (长度, 值) 列表"""
    out = []
    i = bisect.bisect_right(xs, lo) - 1
    x = lo
    while x <= hi:
        end = xs[i + 1] - 1 if i + 1 < len(xs) else m2
        seg_end = min(end, hi)
        out.append((seg_end - x + 1, vals[i]))
        x = seg_end + 1
        i += 1
    return out


def _runs_from_segments(segs: Iterable[Tuple[int, int]]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    xs: List[int] = []
    vals: List[int] = []
    x = 1
    for length, v in segs:
        if length <= 0:
            continue
        if vals and vals[-1] == v:
            x += length
            continue
        xs.append(x)
        vals.append(v)
        x += length
    return tuple(xs), tuple(vals)


class SparseBoard:
    """稀疏棋盘: 行带列表, 每个行带内所有行的游程相同

    bands 的元素为 (y_lo, y_hi, xs, vals), xs 为游程起点, vals 为对应取值;
    护送格同时记录在 escorts 集合中, 以便在 O(p) 时间内校验线移动
    """

    is_sparse = True

    def __init__(self, m1: int, m2: int, k: int, bands: List[tuple], default: int = WHITE,
                 escorts: Optional[Iterable[Cell]] = None):
        if m1 < 1 or m2 < 1:
            raise BoardError("棋盘尺寸必须为正")
        self.m1 = int(m1)
        self.m2 = int(m2)
        self.k = int(k)
        self.default = int(default)
        self._bands = list(bands)
        self._starts = [b[0] for b in self._bands]
        if escorts is None:
            found = []
            for y_lo, y_hi, xs, vals in self._bands:
                for i, v in enumerate(vals):
                    if v != ESCORT:
                        continue
                    end = xs[i + 1] - 1 if i + 1 < len(xs) else self.m2
                    found.extend((x, y) for y in range(y_lo, y_hi + 1) for x in range(xs[i], end + 1))
            escorts = found
        self._escorts = frozenset(escorts)
        if not self._escorts:
            raise BoardError("棋盘至少需要一个护送格")

    # ---- 构造 ----
    @classmethod
    def from_rects(cls, m1: int, m2: int, k: int, default: int, rects: Sequence[Rect]) -> "SparseBoard":
        """由互不重叠的矩形 (覆盖在默认颜色之上) 构造, 重叠时报出两个矩形"""
        for rect in rects:
            x1, y1, x2, y2, v = rect
            if not (1 <= x1 <= x2 <= m2 and 1 <= y1 <= y2 <= m1):
                raise BoardError(f"矩形 {rect[:4]} 超出 {m2}x{m1} 棋盘")
            if not (0 <= v <= k):
                raise BoardError(f"矩形 {rect[:4]} 的颜色 {v} 不在 0..{k}")
        breaks = sorted({1, m1 + 1} | {r[1] for r in rects} | {r[3] + 1 for r in rects})
        order = sorted(range(len(rects)), key=lambda i: rects[i][1])
        active: List[int] = []
        pos = 0
        bands = []
        for lo, nxt in zip(breaks, breaks[1:]):
            while pos < len(order) and rects[order[pos]][1] <= lo:
                active.append(order[pos])
                pos += 1
            active = [i for i in active if rects[i][3] >= lo]
            row = sorted(active, key=lambda i: rects[i][0])
            for a, b in zip(row, row[1:]):
                if rects[b][0] <= rects[a][2]:
                    raise BoardError(f"矩形重叠: {_rect_text(rects[a])} 与 {_rect_text(rects[b])}")
            segs = []
            x = 1
            for i in row:
                x1, _, x2, _, v = rects[i]
                segs.append((x1 - x, default))
                segs.append((x2 - x1 + 1, v))
                x = x2 + 1
            segs.append((m2 - x + 1, default))
            xs, vals = _runs_from_segments(segs)
            bands.append((lo, nxt - 1, xs, vals))
        return cls(m1, m2, k, _merge_bands(bands), default=default)

    @classmethod
    def from_bands(cls, m1: int, m2: int, k: int, rows: Sequence[Tuple[int, int, Sequence[Tuple[int, int]]]],
                   default: int = WHITE) -> "SparseBoard":
        """由 (y_lo, y_hi, [(长度, 值), ...]) 形式的行带构造"""
        bands = []
        expect = 1
        for y_lo, y_hi, segs in rows:
            if y_lo != expect or y_hi < y_lo:
                raise BoardError(f"行带 {y_lo}..{y_hi} 不连续")
            if sum(n for n, _ in segs) != m2:
                raise BoardError(f"行带 {y_lo}..{y_hi} 的宽度不等于 {m2}")
            xs, vals = _runs_from_segments(segs)
            bands.append((y_lo, y_hi, xs, vals))
            expect = y_hi + 1
        if expect != m1 + 1:
            raise BoardError("行带没有覆盖全部行")
        return cls(m1, m2, k, _merge_bands(bands), default=default)

    # ---- 查询 ----
    def _band_at(self, y: int) -> int:
        return bisect.bisect_right(self._starts, y) - 1

    def get(self, x: int, y: int) -> int:
        if not (1 <= x <= self.m2 and 1 <= y <= self.m1):
            raise BoardError(f"坐标 ({x},{y}) 超出 {self.m2}x{self.m1} 棋盘")
        _, _, xs, vals = self._bands[self._band_at(y)]
        return vals[bisect.bisect_right(xs, x) - 1]

    @property
    def escorts(self) -> List[Cell]:
        return sorted(self._escorts)

    def is_escort(self, x: int, y: int) -> bool:
        return (x, y) in self._escorts

    @property
    def bands(self) -> List[tuple]:
        return list(self._bands)

    def histogram(self) -> Dict[int, int]:
        hist = {c: 0 for c in range(0, self.k + 1)}
        for y_lo, y_hi, xs, vals in self._bands:
            height = y_hi - y_lo + 1
            for i, v in enumerate(vals):
                end = xs[i + 1] if i + 1 < len(xs) else self.m2 + 1
                hist[v] = hist.get(v, 0) + (end - xs[i]) * height
        return hist

    def column_segments(self, x: int, lo: int, hi: int) -> List[Tuple[int, int, int]]:
        """第 x 列在 [lo, hi] 行内的取值分段 (y_lo, y_hi, 值), 相邻同值已合并"""
        out: List[List[int]] = []
        i = self._band_at(lo)
        while i < len(self._bands) and self._bands[i][0] <= hi:
            y_lo, y_hi, xs, vals = self._bands[i]
            v = vals[bisect.bisect_right(xs, x) - 1]
            a, b = max(y_lo, lo), min(y_hi, hi)
            if out and out[-1][2] == v:
                out[-1][1] = b
            else:
                out.append([a, b, v])
            i += 1
        return [tuple(s) for s in out]

    # ---- 变换 ----
    def with_shifts(self, shifts: Iterable[LineShift]) -> "SparseBoard":
        bands = list(self._bands)
        starts = list(self._starts)
        escorts = set(self._escorts)
        for shift in shifts:
            if shift.axis == Axis.ROW:
                self._apply_row(bands, starts, shift)
            else:
                self._apply_column(bands, starts, shift)
            key_from = (shift.origin, shift.index) if shift.axis == Axis.ROW else (shift.index, shift.origin)
            key_to = (shift.target, shift.index) if shift.axis == Axis.ROW else (shift.index, shift.target)
            escorts.discard(key_from)
            escorts.add(key_to)
        return SparseBoard(self.m1, self.m2, self.k, bands, default=self.default, escorts=escorts)

    def _isolate(self, bands: List[tuple], starts: List[int], y: int) -> int:
        """拆分行带使第 y 行独立成带, 返回其下标"""
        i = bisect.bisect_right(starts, y) - 1
        y_lo, y_hi, xs, vals = bands[i]
        if y_lo == y_hi:
            return i
        pieces = []
        if y_lo < y:
            pieces.append((y_lo, y - 1, xs, vals))
        pieces.append((y, y, xs, vals))
        if y < y_hi:
            pieces.append((y + 1, y_hi, xs, vals))
        bands[i:i + 1] = pieces
        starts[i:i + 1] = [p[0] for p in pieces]
        return i + (1 if y_lo < y else 0)

    def _apply_row(self, bands: List[tuple], starts: List[int], shift: LineShift) -> None:
        i = self._isolate(bands, starts, shift.index)
        y, _, xs, vals = bands[i]
        a, b = shift.origin, shift.target
        m2 = self.m2
        if a < b:
            segs = (_segments(xs, vals, m2, 1, a - 1) if a > 1 else []) + _segments(xs, vals, m2, a + 1, b)
            segs.append((1, ESCORT))
            if b < m2:
                segs += _segments(xs, vals, m2, b + 1, m2)
        else:
            segs = _segments(xs, vals, m2, 1, b - 1) if b > 1 else []
            segs.append((1, ESCORT))
            segs += _segments(xs, vals, m2, b, a - 1)
            if a < m2:
                segs += _segments(xs, vals, m2, a + 1, m2)
        nxs, nvals = _runs_from_segments(segs)
        bands[i] = (y, y, nxs, nvals)

    def _apply_column(self, bands: List[tuple], starts: List[int], shift: LineShift) -> None:
        x = shift.index
        a, b = shift.origin, shift.target
        lo, hi = min(a, b), max(a, b)
        segs = self.__class__._column_segments_of(bands, starts, x, lo, hi)
        changes: List[Tuple[int, int]] = [(b, ESCORT)]
        if a < b:
            # 瓦片向下移动一格: 每段的最后一行取得上一段的值
            for (y_lo, y_hi, v), nxt in zip(segs, segs[1:]):
                if y_hi < b:
                    changes.append((y_hi, nxt[2]))
        else:
            for prev, (y_lo, y_hi, v) in zip(segs, segs[1:]):
                if y_lo > b:
                    changes.append((y_lo, prev[2]))
        for y, v in changes:
            i = self._isolate(bands, starts, y)
            _, _, xs, vals = bands[i]
            m2 = self.m2
            new = (_segments(xs, vals, m2, 1, x - 1) if x > 1 else []) + [(1, v)]
            if x < m2:
                new += _segments(xs, vals, m2, x + 1, m2)
            nxs, nvals = _runs_from_segments(new)
            bands[i] = (y, y, nxs, nvals)

    @staticmethod
    def _column_segments_of(bands: List[tuple], starts: List[int], x: int, lo: int, hi: int) -> List[tuple]:
        out: List[List[int]] = []
        i = bisect.bisect_right(starts, lo) - 1
        while i < len(bands) and bands[i][0] <= hi:
            y_lo, y_hi, xs, vals = bands[i]
            v = vals[bisect.bisect_right(xs, x) - 1]
            a, b = max(y_lo, lo), min(y_hi, hi)
            if out and out[-1][2] == v:
                out[-1][1] = b
            else:
                out.append([a, b, v])
            i += 1
        return [tuple(s) for s in out]

    # ---- 转换 ----
    def normalized_bands(self) -> List[tuple]:
        return _merge_bands(self._bands)

    def to_rects(self) -> List[Rect]:
        """输出规范化的矩形列表 (不含默认颜色), 按 (y1, x1) 排序"""
        open_runs: Dict[Tuple[int, int, int], int] = {}
        done: List[Rect] = []
        for y_lo, y_hi, xs, vals in self.normalized_bands():
            current = {}
            for i, v in enumerate(vals):
                if v == self.default:
                    continue
                end = xs[i + 1] - 1 if i + 1 < len(xs) else self.m2
                key = (xs[i], end, v)
                current[key] = open_runs.pop(key, y_lo)
            for (x1, x2, v), y1 in open_runs.items():
                done.append((x1, y1, x2, y_lo - 1, v))
            open_runs = current
        for (x1, x2, v), y1 in open_runs.items():
            done.append((x1, y1, x2, self.m1, v))
        return sorted(done, key=lambda r: (r[1], r[0]))

    def to_dense(self, cap: Optional[int] = None) -> DenseBoard:
        if cap is not None and self.m1 * self.m2 > cap:
            raise BoardError(f"棋盘 {self.m2}x{self.m1} 超过稠密化上限 {cap}")
        cells = np.empty((self.m1, self.m2), dtype=np.int8)
        for y_lo, y_hi, xs, vals in self._bands:
            row = np.empty(self.m2, dtype=np.int8)
            for i, v in enumerate(vals):
                end = xs[i + 1] - 1 if i + 1 < len(xs) else self.m2
                row[xs[i] - 1:end] = v
            cells[y_lo - 1:y_hi, :] = row
        return DenseBoard(cells, self.k)

    def to_sparse(self, default: Optional[int] = None) -> "SparseBoard":
        return self

    def window(self, x1: int, y1: int, x2: int, y2: int) -> np.ndarray:
        """取出 [x1..x2] x [y1..y2] 视口为稠密数组, 下标 [y-y1, x-x1]"""
        if not (1 <= x1 <= x2 <= self.m2 and 1 <= y1 <= y2 <= self.m1):
            raise BoardError(f"视口 ({x1},{y1})-({x2},{y2}) 超出棋盘")
        out = np.empty((y2 - y1 + 1, x2 - x1 + 1), dtype=np.int8)
        i = self._band_at(y1)
        while i < len(self._bands) and self._bands[i][0] <= y2:
            y_lo, y_hi, xs, vals = self._bands[i]
            row = [v for n, v in _segments(xs, vals, self.m2, x1, x2) for _ in range(n)]
            out[max(y_lo, y1) - y1:min(y_hi, y2) - y1 + 1, :] = np.array(row, dtype=np.int8)
            i += 1
        return out

    def __eq__(self, other) -> bool:
        return boards_equal(self, other)

    def __hash__(self) -> int:
        return hash(tuple(self.normalized_bands()))

    def __repr__(self) -> str:
        return f"SparseBoard({self.m1}x{self.m2}, k={self.k}, bands={len(self._bands)}, p={len(self._escorts)})"


def _rect_text(rect: Rect) -> str:
    x1, y1, x2, y2, v = rect
    return f"rect {x1} {y1} {x2} {y2} {'escort' if v == ESCORT else v}"


def _merge_bands(bands: Sequence[tuple]) -> List[tuple]:
    out: List[tuple] = []
    for y_lo, y_hi, xs, vals in bands:
        keep = [i for i in range(len(vals)) if i == 0 or vals[i] != vals[i - 1]]
        xs, vals = tuple(xs[i] for i in keep), tuple(vals[i] for i in keep)
        if out and out[-1][2] == xs and out[-1][3] == vals and out[-1][1] + 1 == y_lo:
            out[-1] = (out[-1][0], y_hi, xs, vals)
        else:
            out.append((y_lo, y_hi, xs, vals))
    return out


Board = Union[DenseBoard, SparseBoard]


def boards_equal(a: Board, b: Board) -> bool:
    """颜色映射相等 (同色瓦片可互换)"""
    if not isinstance(a, (DenseBoard, SparseBoard)) or not isinstance(b, (DenseBoard, SparseBoard)):
        return False
    if (a.m1, a.m2) != (b.m1, b.m2):
        return False
    if not a.is_sparse and not b.is_sparse:
        return bool(np.array_equal(a.array, b.array))
    sa = a if a.is_sparse else a.to_sparse()
    sb = b if b.is_sparse else b.to_sparse()
    return sa.normalized_bands() == sb.normalized_bands()


def histogram(board: Board) -> Dict[int, int]:
    """各颜色的瓦片数, 键 0 为护送格数"""
    return board.histogram()


def is_binary(board: Board) -> bool:
    return board.k == 2
