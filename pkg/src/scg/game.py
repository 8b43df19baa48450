"""
沙堡游戏
沙为 1, 洞为 0; 坐标与棋盘相同, x 为列, y 为行, (1,1) 在左下角
"""

import logging
from collections import deque
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..core.errors import BoardError, CapExceededError, IllegalMoveError
from ..models.base_models import PlayResult, Turn

logger = logging.getLogger(__name__)

HOLE = 0
SAND = 1


class ScgBoard:
    """沙/洞网格, 洞的数量随坍缩增量维护"""

    def __init__(self, grid: np.ndarray):
        grid = np.array(grid, dtype=np.uint8)
        if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
            raise BoardError("沙堡网格的尺寸必须至少为 1x1")
        if grid.max() > SAND:
            raise BoardError("沙堡网格只能包含沙与洞")
        self.grid = grid
        self.holes = int(np.count_nonzero(grid == HOLE))

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "ScgBoard":
        """由自顶向下的 `#`/`o` 字符串构造"""
        table = {"#": SAND, "o": HOLE}
        return cls(np.array([[table[ch] for ch in line] for line in reversed(list(rows))], dtype=np.uint8))

    @property
    def r(self) -> int:
        return int(self.grid.shape[0])

    @property
    def c(self) -> int:
        return int(self.grid.shape[1])

    def get(self, x: int, y: int) -> int:
        return int(self.grid[y - 1, x - 1])

    def clone(self) -> "ScgBoard":
        return ScgBoard(self.grid.copy())

    def recount(self) -> int:
        return int(np.count_nonzero(self.grid == HOLE))

    def is_open_row(self, y: int) -> bool:
        return 1 <= y <= self.r and self.grid[y - 1, self.c - 1] == HOLE

    def to_rows(self) -> List[str]:
        return ["".join("#" if v == SAND else "o" for v in self.grid[y - 1]) for y in range(self.r, 0, -1)]

    def __eq__(self, other) -> bool:
        return isinstance(other, ScgBoard) and np.array_equal(self.grid, other.grid)

    def __repr__(self) -> str:
        return f"ScgBoard({self.r}x{self.c}, holes={self.holes})"


def open_tiles(b: ScgBoard) -> List[tuple]:
    """所有开放格: 所在行最右侧为洞的格子, 沙与洞都算"""
    rows = np.flatnonzero(b.grid[:, b.c - 1] == HOLE) + 1
    return [(x, int(y)) for y in rows for x in range(1, b.c + 1)]


def collapse_inplace(b: ScgBoard, t: Turn) -> None:
    """原地执行一次坍缩"""
    if not (1 <= t.x <= b.c and 1 <= t.y <= b.r):
        raise IllegalMoveError(f"回合 ({t.x},{t.y}) 超出 {b.c}x{b.r} 网格")
    if not b.is_open_row(t.y):
        raise IllegalMoveError(f"回合 ({t.x},{t.y}) 不是开放格")
    x, y = t.x - 1, t.y - 1
    line = b.grid[y]
    line[x + 1:] = line[x:-1].copy()
    column = b.grid[:, x]
    column[y:-1] = column[y + 1:].copy()
    column[-1] = SAND
    b.holes -= 1


def collapse(b: ScgBoard, t: Turn) -> ScgBoard:
    """坍缩开放格: 该行向右平移一格并挤出最右侧的洞, 上方的列下落一格, 顶部补沙"""
    out = b.clone()
    collapse_inplace(out, t)
    return out


def play(b: ScgBoard, turns: Sequence[Turn], inplace: bool = False) -> PlayResult:
    """回放回合序列"""
    board = b if inplace else b.clone()
    for i, turn in enumerate(turns):
        if board.holes > 0 and not (board.grid[:, board.c - 1] == HOLE).any():
            return PlayResult(outcome="loss", index=i, holes_left=board.holes)
        if not (1 <= turn.x <= board.c) or not board.is_open_row(turn.y):
            return PlayResult(outcome="stuck", index=i, holes_left=board.holes)
        collapse_inplace(board, turn)
    if board.holes == 0:
        return PlayResult(outcome="win", holes_left=0)
    if not (board.grid[:, board.c - 1] == HOLE).any():
        return PlayResult(outcome="loss", index=len(turns), holes_left=board.holes)
    return PlayResult(outcome="incomplete", holes_left=board.holes)


def settle(b: ScgBoard) -> ScgBoard:
    """重力沉降: 去掉洞, 沙下落, 顶部补沙; 胜利局面必须与之相同"""
    grid = np.empty_like(b.grid)
    for x in range(b.c):
        sand = b.grid[:, x][b.grid[:, x] == SAND]
        grid[:, x] = SAND
        grid[:len(sand), x] = sand
    return ScgBoard(grid)


def random_scg(r: int, c: int, density: float, seed: int) -> ScgBoard:
    """每个格子以概率 density 为洞"""
    rng = np.random.default_rng(seed)
    return ScgBoard((rng.random((r, c)) >= density).astype(np.uint8))


def bounded_search(b: ScgBoard, max_nodes: int = 100_000) -> Optional[List[Turn]]:
    """小网格上的穷举搜索, 返回一个获胜回合序列或 None

    沙格与洞格在同一行内的选择可能得到相同局面, 以网格字节去重
    """
    start = b.grid.tobytes()
    parents: Dict[bytes, Optional[tuple]] = {start: None}
    queue = deque([b.clone()])
    while queue:
        board = queue.popleft()
        key = board.grid.tobytes()
        if board.holes == 0:
            turns: List[Turn] = []
            while parents[key] is not None:
                key, turn = parents[key]
                turns.append(turn)
            return list(reversed(turns))
        for x, y in open_tiles(board):
            turn = Turn(x=x, y=y)
            nxt = collapse(board, turn)
            nkey = nxt.grid.tobytes()
            if nkey in parents:
                continue
            parents[nkey] = (key, turn)
            if len(parents) > max_nodes:
                raise CapExceededError(f"沙堡搜索超过 {max_nodes} 个状态")
            queue.append(nxt)
    return None
