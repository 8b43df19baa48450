"""
实例与计划的文本格式
实例: 首行 `gstp 1 <m1> <m2> <k>`, 之后为 dense 行 (自顶向下, `.` 为护送格, a 为颜色 1)
      或 `sparse <默认颜色>` 加若干 `rect x1 y1 x2 y2 <颜色|escort>`; 坐标以左下角为 (1,1)
计划: 每行一个步骤 `t<i>: R|C <index> <from> <to>; ...`, i 从 0 开始
"""

import logging
import string
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from ..models.base_models import Axis, LineShift, Plan, Step
from .board import ESCORT, Board, DenseBoard, SparseBoard
from .errors import BoardError, FormatError

logger = logging.getLogger(__name__)

FORMAT_VERSION = "1"
COLOR_CHARS = string.ascii_lowercase
ESCORT_CHAR = "."


def color_char(value: int) -> str:
    return ESCORT_CHAR if value == ESCORT else COLOR_CHARS[value - 1]


def _parse_int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"{what} 不是整数: {token!r}", line)


def parse_instance(text: str) -> Board:
    """解析实例文本"""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError("空实例文件", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0] != "gstp":
        raise FormatError("首行必须是 `gstp 1 <m1> <m2> <k>`", 1)
    if header[1] != FORMAT_VERSION:
        raise FormatError(f"不支持的格式版本 {header[1]}", 1)
    m1, m2, k = (_parse_int(t, 1, "尺寸") for t in header[2:])
    if m1 < 1 or m2 < 1 or not (1 <= k <= len(COLOR_CHARS)):
        raise FormatError(f"非法的尺寸或颜色数: {m1} {m2} {k}", 1)
    if len(lines) < 2:
        raise FormatError("缺少 dense 或 sparse 段", 2)
    kind = lines[1].split()
    if kind == ["dense"]:
        return _parse_dense(lines[2:], m1, m2, k)
    if len(kind) == 2 and kind[0] == "sparse":
        default = _parse_int(kind[1], 2, "默认颜色")
        if not 1 <= default <= k:
            raise FormatError(f"默认颜色 {default} 不在 1..{k}", 2)
        return _parse_sparse(lines[2:], m1, m2, k, default)
    raise FormatError("第二行必须是 `dense` 或 `sparse <默认颜色>`", 2)


def _parse_dense(rows: List[str], m1: int, m2: int, k: int) -> DenseBoard:
    if len(rows) != m1:
        raise FormatError(f"dense 段需要 {m1} 行, 实际 {len(rows)} 行", 3 + min(len(rows), m1))
    allowed = {ESCORT_CHAR: ESCORT, **{COLOR_CHARS[i]: i + 1 for i in range(k)}}
    cells = np.empty((m1, m2), dtype=np.int8)
    for offset, row in enumerate(rows):
        line_no = 3 + offset
        row = row.rstrip()
        if len(row) != m2:
            raise FormatError(f"行宽应为 {m2}, 实际 {len(row)}", line_no)
        bad = [ch for ch in row if ch not in allowed]
        if bad:
            raise FormatError(f"非法字符 {bad[0]!r}", line_no)
        cells[m1 - 1 - offset, :] = [allowed[ch] for ch in row]
    try:
        return DenseBoard(cells, k)
    except BoardError as exc:
        raise FormatError(str(exc), 3)


def _parse_sparse(lines: List[str], m1: int, m2: int, k: int, default: int) -> SparseBoard:
    rects = []
    for offset, line in enumerate(lines):
        line_no = 3 + offset
        parts = line.split()
        if not parts:
            continue
        if parts[0] != "rect" or len(parts) != 6:
            raise FormatError("期望 `rect x1 y1 x2 y2 <颜色|escort>`", line_no)
        x1, y1, x2, y2 = (_parse_int(t, line_no, "坐标") for t in parts[1:5])
        value = ESCORT if parts[5] == "escort" else _parse_int(parts[5], line_no, "颜色")
        if value != ESCORT and not 1 <= value <= k:
            raise FormatError(f"颜色 {value} 不在 1..{k}", line_no)
        if not (1 <= x1 <= x2 <= m2 and 1 <= y1 <= y2 <= m1):
            raise FormatError(f"矩形 {x1} {y1} {x2} {y2} 超出 {m2}x{m1} 棋盘", line_no)
        rects.append((x1, y1, x2, y2, value))
    try:
        return SparseBoard.from_rects(m1, m2, k, default, rects)
    except BoardError as exc:
        raise FormatError(str(exc))


def emit_instance(board: Board, form: Optional[str] = None) -> str:
    """输出规范文本; form 为 dense 或 sparse, 默认跟随棋盘表示"""
    form = form or ("sparse" if board.is_sparse else "dense")
    out = [f"gstp {FORMAT_VERSION} {board.m1} {board.m2} {board.k}"]
    if form == "dense":
        cells = board.to_dense().array
        out.append("dense")
        for y in range(board.m1, 0, -1):
            out.append("".join(color_char(int(v)) for v in cells[y - 1]))
    elif form == "sparse":
        sparse = board.to_sparse()
        out.append(f"sparse {sparse.default}")
        for x1, y1, x2, y2, v in sparse.to_rects():
            out.append(f"rect {x1} {y1} {x2} {y2} {'escort' if v == ESCORT else v}")
    else:
        raise FormatError(f"未知的输出形式 {form}")
    return "\n".join(out) + "\n"


def read_instance(path: Union[str, Path]) -> Board:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def write_instance(board: Board, path: Union[str, Path], form: Optional[str] = None) -> None:
    Path(path).write_text(emit_instance(board, form), encoding="utf-8")


def parse_plan(text: str) -> Plan:
    """解析计划文本, 步骤编号必须从 t0 连续递增"""
    steps: List[Step] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        label, sep, body = line.partition(":")
        if not sep or not label.startswith("t"):
            raise FormatError("期望 `t<i>: ...`", line_no)
        index = _parse_int(label[1:], line_no, "步骤编号")
        if index != len(steps):
            raise FormatError(f"步骤编号应为 t{len(steps)}, 实际 t{index}", line_no)
        shifts = []
        for chunk in body.split(";"):
            parts = chunk.split()
            if not parts:
                continue
            if len(parts) != 4 or parts[0] not in ("R", "C"):
                raise FormatError(f"非法的线移动 {chunk.strip()!r}", line_no)
            idx, origin, target = (_parse_int(t, line_no, "线移动参数") for t in parts[1:])
            if origin == target:
                raise FormatError(f"线移动 {chunk.strip()!r} 的起点与终点相同", line_no)
            shifts.append(LineShift(axis=Axis(parts[0]), index=idx, origin=origin, target=target))
        steps.append(Step(shifts=shifts))
    return Plan(steps=steps)


def emit_plan(plan: Plan) -> str:
    lines = []
    for i, step in enumerate(plan.steps):
        body = "; ".join(s.to_text() for s in step.shifts)
        lines.append(f"t{i}: {body}".rstrip())
    return "\n".join(lines) + ("\n" if lines else "")


def read_plan(path: Union[str, Path]) -> Plan:
    return parse_plan(Path(path).read_text(encoding="utf-8"))


def write_plan(plan: Plan, path: Union[str, Path]) -> None:
    Path(path).write_text(emit_plan(plan), encoding="utf-8")
