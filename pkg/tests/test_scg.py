"""
沙堡游戏测试
"""

import numpy as np
import pytest

from src.core import FormatError, IllegalMoveError
from src.models import Turn
from src.scg import (
    HOLE,
    SAND,
    ScgBoard,
    bounded_search,
    collapse,
    emit_scg,
    emit_turns,
    open_tiles,
    parse_scg,
    parse_turns,
    play,
    random_scg,
    settle,
)


def test_open_tiles_definition():
    assert open_tiles(ScgBoard.from_rows(["##", "##"])) == []
    assert open_tiles(ScgBoard.from_rows(["#o"])) == [(1, 1), (2, 1)]


def test_single_hole_collapses_to_win():
    board = ScgBoard.from_rows(["o"])
    after = collapse(board, Turn(x=1, y=1))
    assert after.to_rows() == ["#"]
    assert after.holes == 0
    assert board.holes == 1


def test_sand_shifts_right_and_refills():
    after = collapse(ScgBoard.from_rows(["#o"]), Turn(x=1, y=1))
    assert after.to_rows() == ["##"]


def test_column_above_drops():
    board = ScgBoard.from_rows(["o#", "#o", "oo"])
    after = collapse(board, Turn(x=1, y=2))
    # 第 2 行 [#, o] 右移挤出洞, 第 1 列上方的洞下落, 顶部补沙
    assert after.to_rows() == ["##", "o#", "oo"]
    assert after.holes == board.holes - 1


def test_non_open_turn_is_refused():
    with pytest.raises(IllegalMoveError):
        collapse(ScgBoard.from_rows(["o#"]), Turn(x=1, y=1))


def test_play_outcomes():
    assert play(ScgBoard.from_rows(["##"]), []).outcome == "win"
    board = ScgBoard.from_rows(["#o", "#o"])
    result = play(board, [Turn(x=1, y=1), Turn(x=1, y=2)])
    assert result.outcome == "win"
    assert board.holes == 2
    stuck = play(board, [Turn(x=1, y=1), Turn(x=1, y=1)])
    assert stuck.outcome == "stuck" and stuck.index == 1
    loss = play(ScgBoard.from_rows(["o#"]), [])
    assert loss.outcome == "loss" and loss.index == 0
    assert play(board, [Turn(x=2, y=2)]).outcome == "incomplete"


def _random_playout(samples, seed):
    rng = np.random.default_rng(seed)
    done = 0
    trial = 0
    while done < samples:
        board = random_scg(20, 20, 0.3, seed=seed + trial)
        trial += 1
        while done < samples:
            tiles = open_tiles(board)
            if not tiles:
                break
            x, y = tiles[int(rng.integers(len(tiles)))]
            before = board.grid.copy()
            after = collapse(board, Turn(x=x, y=y))
            assert after.holes == board.holes - 1
            assert after.recount() == after.holes
            assert int((after.grid == SAND).sum()) == int((before == SAND).sum()) + 1
            assert np.array_equal(after.grid[y - 1:-1, x - 1], before[y:, x - 1])
            assert after.grid[-1, x - 1] == SAND
            board = after
            done += 1


def test_every_collapse_removes_one_hole():
    _random_playout(2000, seed=1)


@pytest.mark.slow
def test_every_collapse_removes_one_hole_at_scale():
    _random_playout(10_000, seed=2)


def test_wins_use_exactly_the_hole_count():
    found = 0
    for seed in range(60):
        board = random_scg(3, 3, 0.35, seed=seed)
        turns = bounded_search(board)
        if turns is None:
            continue
        found += 1
        assert len(turns) == board.holes
        final = board.clone()
        assert play(final, turns, inplace=True).outcome == "win"
        assert final == settle(board)
    assert found > 0


def test_settle_compacts_columns():
    board = ScgBoard.from_rows(["#o", "o#", "#o"])
    settled = settle(board)
    assert (settled.grid == SAND).all()
    assert settled.holes == 0


def test_scg_text_round_trip():
    text = "scg 1 2 3\n#o#\noo#\n"
    board = parse_scg(text)
    assert board.get(1, 1) == HOLE and board.get(1, 2) == SAND
    assert emit_scg(board) == text
    turns = parse_turns("1 2\n3 1\n")
    assert turns == [Turn(x=1, y=2), Turn(x=3, y=1)]
    assert emit_turns(turns) == "1 2\n3 1\n"


def test_scg_parse_errors_carry_line_numbers():
    with pytest.raises(FormatError) as exc:
        parse_scg("scg 1 2 2\n##\n#x\n")
    assert exc.value.line == 3
    with pytest.raises(FormatError):
        parse_scg("scg 2 1 1\n#\n")
