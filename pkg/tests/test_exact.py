"""
精确搜索, 下界与坍缩统计测试
"""

import itertools

import numpy as np
import pytest

from src.core import (
    BLACK,
    ESCORT,
    WHITE,
    BoardError,
    CapExceededError,
    DenseBoard,
    IncompatibleInstanceError,
    apply_step,
    canonical_goal,
    expand_step,
    random_board,
    validate_generic_step,
    validate_plan,
    validate_step,
)
from src.dnc import solve_bgsp
from src.exact import (
    bfs_optimal,
    canonical_key,
    collapse_stats,
    iddfs_optimal,
    lb,
    lb_distance,
    lb_manhattan,
    lb_transport,
    legal_steps,
    makespan_shape,
    threshold,
)
from src.models import GoalSpec, Step


def corner_black(m):
    rows = [[1] * m for _ in range(m)]
    rows[0][0] = 2
    rows[0][-1] = 0
    return DenseBoard.from_rows(rows, k=2)


def test_start_equal_goal_is_zero():
    board = DenseBoard.from_rows([[1, 0], [2, 1]], k=2)
    result = bfs_optimal(board)
    assert (result.status, result.makespan, result.plan.makespan) == ("optimal", 0, 0)
    assert lb(board) == 0
    assert lb_transport(board) == 0


def test_two_by_two_needs_two_steps():
    board = DenseBoard.from_rows([[2, 1], [0, 1]], k=2)
    result = bfs_optimal(board)
    assert result.status == "optimal"
    assert result.makespan == 2
    assert validate_plan(board, canonical_goal(board), result.plan).ok
    assert iddfs_optimal(board) == 2


def test_single_full_line_shift():
    board = DenseBoard.from_rows([[0, 2, 1]], k=2)
    result = bfs_optimal(board, GoalSpec.explicit(DenseBoard.from_rows([[2, 1, 0]], k=2)))
    assert result.makespan == 1
    assert len(result.plan.steps[0].shifts) == 1


def test_unreachable_and_exhausted():
    board = DenseBoard.from_rows([[0, 1, 2]], k=2)
    assert bfs_optimal(board).status == "unreachable"
    board = random_board(3, 3, [4, 4], 1, seed=1)
    assert bfs_optimal(board, budget=1).status == "exhausted"


def test_search_caps():
    with pytest.raises(CapExceededError):
        bfs_optimal(random_board(4, 4, [8, 7], 1, seed=0))
    with pytest.raises(CapExceededError):
        bfs_optimal(random_board(3, 3, [3, 3], 3, seed=0))
    with pytest.raises(BoardError):
        bfs_optimal(random_board(3, 3, [4, 4], 1, seed=0), p=2)


def test_steps_use_disjoint_shifts():
    board = DenseBoard.from_rows([[0, 1, 1], [1, 2, 0]], k=2)
    steps = list(legal_steps(board.array))
    # 每个护送格 3 个单独移动, 组合中去掉共线重叠的
    assert all(1 <= len(s) <= 2 for s in steps)
    assert sum(1 for s in steps if len(s) == 1) == 6
    for shifts in steps:
        assert validate_step(board, Step(shifts=shifts)).ok


def test_canonical_key_ignores_representation():
    board = random_board(3, 4, [5, 6], 1, seed=3)
    assert canonical_key(board) == canonical_key(board.to_sparse())
    assert canonical_key(board) == canonical_key(board.array.copy())
    other = random_board(3, 4, [5, 6], 1, seed=4)
    assert (canonical_key(board) == canonical_key(other)) == (board == other)


@pytest.mark.parametrize("seed", range(5))
def test_iddfs_agrees_with_bfs(seed):
    board = random_board(2, 3, [3, 2], 1, seed=seed)
    assert iddfs_optimal(board, max_depth=20) == bfs_optimal(board).makespan


@pytest.mark.parametrize("m1,m2", [(2, 2), (2, 3), (3, 3), (3, 4)])
def test_bounds_and_solver_sandwich_optimum(m1, m2):
    n = m1 * m2 - 1
    for blacks in sorted({1, n // 3, n // 2}):
        for seed in (0, 1):
            board = random_board(m1, m2, [n - blacks, blacks], 1, seed=seed)
            optimum = bfs_optimal(board)
            assert optimum.status == "optimal"
            assert validate_plan(board, canonical_goal(board), optimum.plan).ok
            assert lb(board, exact_transport=True) <= optimum.makespan
            assert optimum.makespan <= solve_bgsp(board).makespan


@pytest.mark.slow
def test_sandwich_with_two_escorts():
    for seed in range(3):
        board = random_board(3, 4, [5, 5], 2, seed=seed)
        optimum = bfs_optimal(board)
        assert optimum.status == "optimal"
        assert lb(board, exact_transport=True) <= optimum.makespan <= solve_bgsp(board).makespan


def test_distance_bound_for_corner_black():
    board = corner_black(4)
    assert lb_distance(board) == 3
    assert lb_manhattan(board) == 1
    assert lb_transport(board) == 2
    assert lb(board) == 3
    assert lb(board, exact_transport=True) == 3


def test_bounds_scale_with_escorts():
    board = random_board(6, 6, [17, 17], 2, seed=2)
    assert lb_manhattan(board, p=1) >= lb_manhattan(board, p=2)


def test_makespan_shape():
    assert makespan_shape(16, 1, 1) == 128
    assert makespan_shape(16, 1, 4) == 64 + 16
    assert makespan_shape(1, 1) == 1.0


def test_collapse_single_sample():
    stats = collapse_stats(8, 1, 20, seed=1)
    assert stats.mean_rows[1] == 1.0 and stats.mean_cols[1] == 1.0
    assert all(stats.mean_cols[p] == 0.0 for p in range(2, 9))
    assert stats.identity_fraction == 1.0


def test_collapse_is_deterministic():
    assert collapse_stats(16, 40, 30, seed=9) == collapse_stats(16, 40, 30, seed=9)
    with pytest.raises(BoardError):
        collapse_stats(0, 1, 1, seed=0)


def test_collapse_threshold_holds_at_desk_scale():
    stats = collapse_stats(64, 64, 1000, seed=12345)
    assert stats.identity_fraction == 1.0
    assert stats.thresholds[2] == pytest.approx(threshold(2, 64, 64))
    for p in range(1, 9):
        assert stats.pass_fraction[p] >= 0.95


def all_boards(m1, m2, blacks):
    n = m1 * m2
    for escort in range(n):
        rest = [i for i in range(n) if i != escort]
        for chosen in itertools.combinations(rest, blacks):
            cells = np.full(n, WHITE, dtype=np.int8)
            cells[escort] = ESCORT
            cells[list(chosen)] = BLACK
            yield DenseBoard(cells.reshape(m1, m2), 2)


@pytest.mark.slow
def test_every_small_board_against_oracle():
    shapes = [(m1, m2) for m1 in range(1, 10) for m2 in range(1, 10) if 2 <= m1 * m2 <= 9]
    for m1, m2 in shapes:
        for blacks in range(1, min(3, m1 * m2 - 1) + 1):
            for board in all_boards(m1, m2, blacks):
                optimum = bfs_optimal(board)
                if optimum.status == "unreachable":
                    assert min(m1, m2) == 1
                    with pytest.raises(IncompatibleInstanceError):
                        solve_bgsp(board)
                    continue
                assert optimum.status == "optimal"
                state = board
                for step in optimum.plan.steps:
                    assert validate_generic_step(state, expand_step(state, step)).ok
                    state = apply_step(state, step)
                assert state == canonical_goal(board)
                assert lb(board, exact_transport=True) <= optimum.makespan <= solve_bgsp(board).makespan
