"""
核心模块测试: 棋盘, 线移动, 目标, 计划校验
"""

import numpy as np
import pytest

from src.core import (
    BoardError,
    DenseBoard,
    IllegalMoveError,
    IncompatibleInstanceError,
    SparseBoard,
    apply_step,
    boards_equal,
    canonical_goal,
    escort_cells,
    expand_step,
    invert_step,
    random_board,
    validate_generic_step,
    validate_plan,
    validate_step,
)
from src.models import Axis, Corner, GoalSpec, LineShift, Plan, Step


def row(y, a, b):
    return LineShift(axis=Axis.ROW, index=y, origin=a, target=b)


def col(x, a, b):
    return LineShift(axis=Axis.COLUMN, index=x, origin=a, target=b)


def two_by_two():
    # 自顶向下: 第 2 行 [黑, 白], 第 1 行 [护送, 白]
    return DenseBoard.from_rows([[2, 1], [0, 1]], k=2)


def random_step(board, rng):
    """随机生成一个合法且互不相交的步骤"""
    escorts = board.escorts
    rng.shuffle(escorts)
    chosen = []
    for ex, ey in escorts:
        axis = Axis.ROW if rng.random() < 0.5 else Axis.COLUMN
        fixed, pos = (ey, ex) if axis == Axis.ROW else (ex, ey)
        limit = board.m2 if axis == Axis.ROW else board.m1
        options = []
        for direction in (-1, 1):
            t = pos + direction
            while 1 <= t <= limit:
                cell = (t, fixed) if axis == Axis.ROW else (fixed, t)
                if board.get(*cell) == 0:
                    break
                options.append(t)
                t += direction
        if not options:
            continue
        shift = LineShift(axis=axis, index=fixed, origin=pos, target=int(rng.choice(options)))
        trial = Step(shifts=chosen + [shift])
        if validate_step(board, trial).ok:
            chosen.append(shift)
    return Step(shifts=chosen)


def test_single_column_shift_moves_black_down():
    board = two_by_two()
    step = Step(shifts=[col(1, 1, 2)])
    assert validate_step(board, step).ok
    after = apply_step(board, step)
    assert after.get(1, 1) == 2
    assert after.get(1, 2) == 0


def test_shifts_sharing_a_cell_overlap():
    cells = np.ones((4, 4), dtype=np.int8)
    cells[2, 0] = 0  # (1,3)
    cells[0, 2] = 0  # (3,1)
    board = DenseBoard(cells, 2)
    report = validate_step(board, Step(shifts=[row(3, 1, 4), col(3, 1, 4)]))
    assert not report.ok
    assert report.kind == "overlap"


def test_shift_from_non_escort_is_illegal():
    report = validate_step(two_by_two(), Step(shifts=[row(2, 1, 2)]))
    assert report.kind == "illegal-shift"
    with pytest.raises(IllegalMoveError):
        apply_step(two_by_two(), Step(shifts=[row(2, 1, 2)]))


def test_out_of_range_shift_reports_range():
    report = validate_step(two_by_two(), Step(shifts=[col(1, 1, 3)]))
    assert report.kind == "range"


def test_generic_validator_rejects_perpendicular_follow():
    board = DenseBoard.from_rows([[1, 0], [2, 1]], k=2)
    moves = {(2, 1): (0, 1), (1, 1): (1, 0)}
    report = validate_generic_step(board, moves)
    assert report.kind == "cfc"


def test_generic_validator_identity_and_head_on():
    board = DenseBoard.from_rows([[1, 2, 0]], k=2)
    assert validate_generic_step(board, {}).ok
    assert validate_generic_step(board, {(1, 1): (0, 0)}).ok
    report = validate_generic_step(board, {(1, 1): (1, 0), (2, 1): (-1, 0)})
    assert report.kind == "head-on"
    assert validate_generic_step(board, {(2, 1): (2, 0)}).kind == "motion"


def test_parallel_row_shifts_expand_to_legal_motion():
    board = DenseBoard.from_rows([[0, 1, 2], [0, 2, 1]], k=2)
    step = Step(shifts=[row(1, 1, 3), row(2, 1, 3)])
    assert validate_step(board, step).ok
    assert validate_generic_step(board, expand_step(board, step)).ok


def test_full_line_shift_and_empty_step():
    board = DenseBoard.from_rows([[0, 2, 1]], k=2)
    assert apply_step(board, Step()) == board
    after = apply_step(board, Step(shifts=[row(1, 1, 3)]))
    assert after == DenseBoard.from_rows([[2, 1, 0]], k=2)


def _fuzz_disjoint_steps(samples, seed):
    rng = np.random.default_rng(seed)
    for i in range(samples):
        m1, m2 = int(rng.integers(1, 7)), int(rng.integers(2, 7))
        p = int(rng.integers(1, min(4, m1 * m2 - 1) + 1))
        blacks = int(rng.integers(0, m1 * m2 - p + 1))
        board = random_board(m1, m2, [m1 * m2 - p - blacks, blacks], p, seed=i)
        step = random_step(board, rng)
        assert validate_step(board, step).ok
        assert validate_generic_step(board, expand_step(board, step)).ok
        after = apply_step(board, step)
        assert after.histogram() == board.histogram()
        assert apply_step(after, invert_step(step)) == board


def test_disjoint_steps_are_sound():
    _fuzz_disjoint_steps(2000, seed=7)


@pytest.mark.slow
def test_disjoint_steps_are_sound_at_scale():
    _fuzz_disjoint_steps(100_000, seed=11)


def test_sparse_shifts_match_dense():
    rng = np.random.default_rng(3)
    for i in range(200):
        m1, m2 = int(rng.integers(2, 12)), int(rng.integers(2, 12))
        p = int(rng.integers(1, 4))
        blacks = int(rng.integers(0, m1 * m2 - p + 1))
        dense = random_board(m1, m2, [m1 * m2 - p - blacks, blacks], p, seed=100 + i)
        sparse = dense.to_sparse()
        for _ in range(10):
            step = random_step(dense, rng)
            assert validate_step(sparse, step).ok
            dense = apply_step(dense, step)
            sparse = apply_step(sparse, step)
            assert boards_equal(dense, sparse)
            assert sparse.escorts == dense.escorts
        assert sparse.to_dense() == dense


def test_sparse_rects_cover_grid_and_report_overlap():
    board = SparseBoard.from_rects(5, 6, 2, 1, [(1, 1, 6, 2, 2), (6, 5, 6, 5, 0)])
    assert board.get(3, 2) == 2
    assert board.get(3, 3) == 1
    assert board.escorts == [(6, 5)]
    assert sum(board.histogram().values()) == 30
    with pytest.raises(BoardError) as exc:
        SparseBoard.from_rects(5, 6, 2, 1, [(1, 1, 3, 3, 2), (3, 3, 4, 4, 2), (6, 5, 6, 5, 0)])
    assert "rect 1 1 3 3 2" in str(exc.value)
    assert "rect 3 3 4 4 2" in str(exc.value)


def test_sparse_board_without_escort_is_rejected():
    with pytest.raises(BoardError):
        SparseBoard.from_rects(3, 3, 2, 1, [(1, 1, 3, 1, 2)])


def test_two_step_plan_reaches_layered_goal():
    board = two_by_two()
    goal = GoalSpec.layered([2, 1], Corner.TOP_RIGHT)
    plan = Plan(steps=[Step(shifts=[col(1, 1, 2)]), Step(shifts=[row(2, 1, 2)])])
    report = validate_plan(board, goal, plan)
    assert report.ok
    assert report.makespan == 2


def test_identity_plan_and_final_mismatch():
    board = two_by_two()
    report = validate_plan(board, GoalSpec.explicit(board), Plan())
    assert report.ok and report.makespan == 0
    goal = GoalSpec.layered([2, 1])
    short = Plan(steps=[Step(shifts=[col(1, 1, 2)])])
    report = validate_plan(board, goal, short)
    assert not report.ok
    assert report.kind == "final"


def test_failing_step_index_is_reported():
    board = two_by_two()
    plan = Plan(steps=[Step(shifts=[col(1, 1, 2)]), Step(shifts=[col(1, 1, 2)])])
    report = validate_plan(board, GoalSpec.layered([2, 1]), plan)
    assert report.kind == "illegal-shift"
    assert report.step_index == 1


def test_histogram_mismatch_is_incompatible():
    board = two_by_two()
    other = DenseBoard.from_rows([[2, 2], [0, 1]], k=2)
    with pytest.raises(IncompatibleInstanceError):
        validate_plan(board, GoalSpec.explicit(other), Plan())


def test_canonical_goal_four_by_four():
    board = random_board(4, 4, [4, 11], 1, seed=5)
    goal = canonical_goal(board, [2, 1])
    for y in (1, 2):
        assert all(goal.get(x, y) == 2 for x in range(1, 5))
    assert [goal.get(x, 3) for x in range(1, 5)] == [2, 2, 2, 1]
    assert [goal.get(x, 4) for x in range(1, 5)] == [1, 1, 1, 0]


def test_canonical_goal_single_color():
    board = DenseBoard.from_rows([[1, 0], [1, 1]], k=1)
    goal = canonical_goal(board, [1])
    assert goal.escorts == [(2, 2)]
    assert goal.histogram() == board.histogram()


def test_canonical_goal_rejects_bad_order():
    with pytest.raises(BoardError):
        canonical_goal(two_by_two(), [1, 1])


@pytest.mark.parametrize("corner", list(Corner))
@pytest.mark.parametrize("axis", ["rows", "columns"])
def test_sparse_goal_matches_dense(corner, axis):
    board = random_board(64, 64, [2000, 1000, 1093], 3, seed=17)
    dense_goal = canonical_goal(board, [2, 3, 1], corner, axis)
    sparse_goal = canonical_goal(board.to_sparse(), [2, 3, 1], corner, axis)
    assert sparse_goal.is_sparse
    assert boards_equal(dense_goal, sparse_goal)


def test_escort_cells_follow_corner_distance():
    assert escort_cells(3, 4, 3, Corner.TOP_RIGHT) == [(4, 3), (3, 3), (2, 3)]
    assert escort_cells(3, 4, 4, Corner.BOTTOM_LEFT, "columns") == [(1, 1), (1, 2), (1, 3), (2, 1)]


def test_window_of_sparse_board():
    board = SparseBoard.from_rects(4, 4, 2, 1, [(2, 2, 3, 3, 2), (4, 4, 4, 4, 0)])
    win = board.window(2, 2, 4, 4)
    assert win.shape == (3, 3)
    assert win[0, 0] == 2 and win[2, 2] == 0 and win[0, 2] == 1


def test_random_board_is_deterministic():
    a = random_board(16, 16, [239, 16], 1, seed=42)
    b = random_board(16, 16, [239, 16], 1, seed=42)
    assert a == b
    assert a.histogram() == {0: 1, 1: 239, 2: 16}
    with pytest.raises(BoardError):
        random_board(4, 4, [10, 3], 1, seed=0)
