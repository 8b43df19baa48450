"""
沙堡网格与回合日志的文本格式
网格: 首行 `scg 1 <r> <c>`, 之后 r 行自顶向下, `#` 为沙, `o` 为洞
回合日志: 每行 `<x> <y>`
"""

from pathlib import Path
from typing import List, Sequence, Union

from ..core.errors import FormatError
from ..models.base_models import Turn
from .game import ScgBoard


def parse_scg(text: str) -> ScgBoard:
    lines = [line.rstrip() for line in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    header = lines[0].split() if lines else []
    if len(header) != 4 or header[0] != "scg":
        raise FormatError("首行必须是 `scg 1 <r> <c>`", 1)
    if header[1] != "1":
        raise FormatError(f"不支持的格式版本 {header[1]}", 1)
    try:
        r, c = int(header[2]), int(header[3])
    except ValueError:
        raise FormatError("尺寸必须是整数", 1)
    if r < 1 or c < 1:
        raise FormatError("尺寸必须至少为 1", 1)
    rows = lines[1:]
    if len(rows) != r:
        raise FormatError(f"需要 {r} 行, 实际 {len(rows)} 行", 2 + min(len(rows), r))
    for offset, row in enumerate(rows):
        if len(row) != c:
            raise FormatError(f"行宽应为 {c}, 实际 {len(row)}", 2 + offset)
        if set(row) - {"#", "o"}:
            raise FormatError(f"非法字符 {sorted(set(row) - {'#', 'o'})[0]!r}", 2 + offset)
    return ScgBoard.from_rows(rows)


def emit_scg(board: ScgBoard) -> str:
    return "\n".join([f"scg 1 {board.r} {board.c}", *board.to_rows()]) + "\n"


def parse_turns(text: str) -> List[Turn]:
    turns = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise FormatError("期望 `<x> <y>`", line_no)
        try:
            turns.append(Turn(x=int(parts[0]), y=int(parts[1])))
        except ValueError:
            raise FormatError("坐标必须是整数", line_no)
    return turns


def emit_turns(turns: Sequence[Turn]) -> str:
    return "".join(f"{t.x} {t.y}\n" for t in turns)


def read_scg(path: Union[str, Path]) -> ScgBoard:
    return parse_scg(Path(path).read_text(encoding="utf-8"))


def read_turns(path: Union[str, Path]) -> List[Turn]:
    return parse_turns(Path(path).read_text(encoding="utf-8"))
