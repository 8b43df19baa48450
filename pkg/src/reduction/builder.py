"""
构造 3SAT 归约得到的单护送格二值实例
H (底部 r x c 子网格) 以稠密数组栅格化, 其余部分直接写成稀疏行带
"""

import logging
from typing import List, Tuple

import numpy as np

from ..core.board import BLACK, ESCORT, WHITE, SparseBoard
from ..core.errors import BoardError
from ..core.goals import COLUMNS, canonical_goal
from ..models.base_models import CnfFormula, Corner, ReductionLayout
from ..scg.game import HOLE, SAND, ScgBoard
from .layout import DEFAULT_CAP, derive_layout, literal_order

logger = logging.getLogger(__name__)


def rasterize_h(f: CnfFormula, layout: ReductionLayout) -> np.ndarray:
    """H 的稠密栅格, 下标 [y-1, x-1], 取值 WHITE / BLACK"""
    n, q, c, h, r = f.num_vars, layout.q, layout.c, layout.h, layout.r
    m_clauses = f.num_clauses
    grid = np.full((r, c), BLACK, dtype=np.int8)
    var_lo = q + m_clauses  # 变量列 j 位于 x = var_lo + j
    inner = slice(q, c - 2)  # 子句列与变量列

    def white(x: int, y: int) -> None:
        grid[y - 1, x - 1] = WHITE

    white(c - 1, 1)
    white(c, 1)

    gravity = layout.layer("gravity")
    grid[gravity.y_lo - 1:gravity.y_hi, inner] = WHITE
    white(c, gravity.y_lo)
    white(c - 1, gravity.y_lo + 1)

    y_v = layout.layer("vacuum").y_lo
    grid[y_v - 1, inner] = WHITE
    white(c, y_v)
    white(c - 1, y_v + 1)

    control = layout.layer("control")
    white(c - 1, control.y_lo)
    white(c, control.y_lo)
    grid[control.y_lo - 1:control.y_hi, var_lo:c - 2] = WHITE

    for literal, gadget in zip(literal_order(n), layout.gadgets):
        i = abs(literal)
        yb = gadget.y_lo
        white(c - 1, yb)
        white(c, yb)
        for j in range(1, 2 * n + 1):
            if j <= 2 * (i - 1):
                second = True
            elif j >= 2 * i + 1:
                second = False
            elif j == 2 * i - 1:
                second = literal > 0
            else:
                second = literal < 0
            white(var_lo + j, yb + 1 if second else yb)
        grid[yb - 1, q:q + m_clauses] = WHITE
        for j, clause in enumerate(f.clauses, start=1):
            if literal in clause:
                grid[yb - 1:gadget.y_hi, q + j - 1] = WHITE

    clause_layer = layout.layer("clause")
    y_cl = clause_layer.y_lo
    grid[y_cl - 1, 0:q] = WHITE
    white(c - 1, y_cl)
    white(c, y_cl)
    grid[y_cl, var_lo:c - 2] = WHITE
    grid[clause_layer.y_hi - 1, q:q + m_clauses] = WHITE
    return grid


def _row_segments(row: np.ndarray) -> List[Tuple[int, int]]:
    change = np.flatnonzero(row[1:] != row[:-1]) + 1
    bounds = np.concatenate(([0], change, [len(row)]))
    return [(int(b - a), int(row[a])) for a, b in zip(bounds[:-1], bounds[1:])]


def _instance_bands(layout: ReductionLayout, h_grid: np.ndarray, tail: int) -> list:
    m, c, r = layout.m, layout.c, layout.r
    bands = []
    for y in range(1, r + 1):
        bands.append((y, y, _row_segments(h_grid[y - 1]) + [(m - c, WHITE)]))
    bands.append((r + 1, m - 1, [(c, BLACK), (m - c, WHITE)]))
    bands.append((m, m, [(c + tail, BLACK), (m - c - tail - 1, WHITE), (1, ESCORT)]))
    return bands


def build_instance(f: CnfFormula, cap: int = DEFAULT_CAP) -> Tuple[SparseBoard, ReductionLayout]:
    """m x m 稀疏实例: G 在左下, 其上一行黑格带长为 w 的尾巴, 护送格在右上角, 其余为白"""
    layout = derive_layout(f, cap)
    h_grid = rasterize_h(f, layout)
    whites = int(np.count_nonzero(h_grid == WHITE))
    if whites != layout.w:
        raise BoardError(f"栅格白格数 {whites} 与推导的 w={layout.w} 不一致")
    board = SparseBoard.from_bands(layout.m, layout.m, 2, _instance_bands(layout, h_grid, layout.w), default=WHITE)
    return board, layout


def instance_goal(board: SparseBoard) -> SparseBoard:
    """目标: 黑格按列填满左侧, 白格在右, 护送格在右上角"""
    return canonical_goal(board, [BLACK, WHITE], Corner.TOP_RIGHT, COLUMNS)


def embedded_scg(board: SparseBoard, layout: ReductionLayout) -> ScgBoard:
    """取出 H 作为沙堡网格: 白为洞, 黑为沙"""
    window = board.window(1, 1, layout.c, layout.r)
    return ScgBoard(np.where(window == BLACK, SAND, HOLE).astype(np.uint8))


def lift_scg(board: SparseBoard, layout: ReductionLayout, scg: ScgBoard) -> SparseBoard:
    """沙堡局面在实例上的提升: H 取自 scg, 顶行尾巴长度等于剩余洞数, 护送格在右上角"""
    h_grid = np.where(scg.grid == SAND, BLACK, WHITE).astype(np.int8)
    return SparseBoard.from_bands(layout.m, layout.m, board.k, _instance_bands(layout, h_grid, scg.holes),
                                  default=board.default)
