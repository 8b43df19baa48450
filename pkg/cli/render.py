"""
ASCII 帧渲染
每帧为棋盘自顶向下的行, 字符与实例文件的 dense 段一致
"""

import logging
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from src.core import BoardError, apply_step
from src.core.board import Board
from src.core.formats import color_char
from src.models import Plan, StagePlan

logger = logging.getLogger(__name__)

Viewport = Tuple[int, int, int, int]


def _check_viewport(board: Board, viewport: Optional[Viewport]) -> Viewport:
    if viewport is None:
        if board.is_sparse:
            raise BoardError("稀疏棋盘只能渲染指定的视口, 请给出 --viewport x1 y1 x2 y2")
        return 1, 1, board.m2, board.m1
    x1, y1, x2, y2 = viewport
    if not (1 <= x1 <= x2 <= board.m2 and 1 <= y1 <= y2 <= board.m1):
        raise BoardError(f"视口 {viewport} 超出棋盘 {board.m2}x{board.m1}")
    return viewport


def render_board(board: Board, viewport: Optional[Viewport] = None) -> List[str]:
    x1, y1, x2, y2 = _check_viewport(board, viewport)
    cells = board.window(x1, y1, x2, y2)
    return ["".join(color_char(int(v)) for v in row) for row in cells[::-1]]


def stage_boundaries(stages: Sequence[StagePlan]) -> List[int]:
    """各阶段结束时已执行的步数, 空阶段不产生关键帧"""
    marks, total = [], 0
    for stage in stages:
        if stage.steps:
            total += len(stage.steps)
            marks.append(total)
    return marks


def render_frames(board: Board, plan: Optional[Plan] = None, viewport: Optional[Viewport] = None,
                  keyframes: Optional[Iterable[int]] = None) -> Iterator[str]:
    """逐帧输出; 给出 keyframes 时只输出这些时刻 (以及起始帧)"""
    _check_viewport(board, viewport)
    steps = plan.steps if plan is not None else []
    wanted = None if keyframes is None else set(keyframes) | {0}
    current = board
    for t in range(len(steps) + 1):
        if t > 0:
            current = apply_step(current, steps[t - 1])
        if wanted is None or t in wanted:
            yield "\n".join([f"# t={t}"] + render_board(current, viewport))
    logger.debug("渲染 %d 步", len(steps))
