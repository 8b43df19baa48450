"""
分治求解器测试: 搬运原语, 区域排序, 各阶段与整体求解
"""

import numpy as np
import pytest

from src.core import (
    BLACK,
    ESCORT,
    WHITE,
    BoardError,
    DenseBoard,
    IncompatibleInstanceError,
    PlanningError,
    UnsupportedError,
    canonical_goal,
    random_bgsp,
    random_board,
    validate_plan,
)
from src.dnc import (
    BlockGrid,
    Box,
    PlanBuilder,
    RegionSorter,
    block_counts,
    density_ok,
    final_drag,
    find_route,
    is_normal,
    margin_target,
    merge_pass,
    normalize8,
    packed_target,
    rotate_ring,
    solve_bgsp,
    solve_bgsp_staged,
    solve_cgsp,
    solve_line,
    sort_region,
    spread,
    strip_boxes,
)
from src.models import GoalSpec


def blacks_of(builder):
    ys, xs = np.nonzero(builder.cells == BLACK)
    return sorted((int(x) + 1, int(y) + 1) for x, y in zip(xs, ys))


def test_route_prefers_few_turns():
    blocked = np.zeros((5, 5), dtype=bool)
    path = find_route(blocked, (1, 1), (5, 5), Box(1, 1, 5, 5))
    assert len(path) == 9
    turns = sum(
        1 for a, b, c in zip(path, path[1:], path[2:])
        if (b[0] - a[0], b[1] - a[1]) != (c[0] - b[0], c[1] - b[1])
    )
    assert turns == 1
    blocked[:, 2] = True
    assert find_route(blocked, (1, 1), (5, 5), Box(1, 1, 5, 5)) is None


def test_walk_merges_straight_runs():
    board = DenseBoard(np.where(np.arange(25).reshape(5, 5) == 0, ESCORT, WHITE), 1)
    builder = PlanBuilder(board)
    builder.walk([(1, 1), (2, 1), (3, 1), (3, 2), (3, 3)])
    assert len(builder.steps) == 2
    assert builder.escorts == [(3, 3)]


def test_ring_rotation_moves_tiles_clockwise():
    board = DenseBoard.from_rows([[0, 1, 2], [3, 4, 5]], k=5)
    builder = PlanBuilder(board)
    rotate_ring(builder, Box(1, 1, 3, 2), clockwise=True)
    assert len(builder.steps) == 4
    assert builder.board() == DenseBoard.from_rows([[0, 3, 1], [4, 5, 2]], k=5)


def test_packed_target_layout():
    target = packed_target(2, 3, [(BLACK, 2), (WHITE, 3)])
    assert target.tolist() == [[BLACK, BLACK, WHITE], [WHITE, WHITE, ESCORT]]


def test_region_sorter_reaches_target():
    board = random_board(5, 6, [14, 15], 1, seed=11)
    builder = PlanBuilder(board)
    target = canonical_goal(board).array
    RegionSorter(builder, builder.bounds, target).run()
    assert np.array_equal(builder.cells, target)
    assert validate_plan(board, canonical_goal(board), builder.plan()).ok


def grid_of(builder):
    return BlockGrid.blocks(builder.bounds)


def board_with(size, rows, escort=None):
    """rows: {y: [x, ...]} 处放黑格, 其余为白格"""
    cells = np.full((size, size), WHITE, dtype=np.int8)
    for y, xs in rows.items():
        for x in xs:
            cells[y - 1, x - 1] = BLACK
    ex, ey = escort or (size, size)
    cells[ey - 1, ex - 1] = ESCORT
    return DenseBoard(cells, 2)


def test_block_grid_absorbs_remainder():
    grid = BlockGrid.blocks(Box(1, 1, 20, 16))
    assert (grid.xs, grid.ys) == ([1, 9, 21], [1, 9, 17])
    assert grid.rect(1, 0) == Box(9, 1, 20, 8)
    assert grid.limits().tolist() == [[32, 48], [32, 48]]
    merged = grid.merged_columns()
    assert (merged.columns, merged.rows) == (1, 2)
    assert merged.merged_rows().rect(0, 0) == Box(1, 1, 20, 16)


def test_spread_without_blacks_is_empty():
    builder = PlanBuilder(random_bgsp(32, 0, 1, seed=1))
    stage = spread(builder, grid_of(builder))
    assert stage.steps == []
    assert stage.flags == []


def test_spread_relieves_crowded_block():
    cells = np.full((32, 32), WHITE, dtype=np.int8)
    crowded = np.zeros(64, dtype=bool)
    crowded[:40] = True
    cells[:8, :8][crowded.reshape(8, 8)] = BLACK
    cells[31, 31] = ESCORT
    builder = PlanBuilder(DenseBoard(cells, 2))
    grid = grid_of(builder)
    assert not density_ok(builder.cells, grid)
    stage = spread(builder, grid)
    assert density_ok(builder.cells, grid)
    assert int(block_counts(builder.cells, grid).sum()) == 40
    assert stage.attributed_steps == len(stage.steps) > 0


def test_density_audit_random_board():
    builder = PlanBuilder(random_bgsp(64, 64, 1, seed=5))
    spread(builder, grid_of(builder))
    assert density_ok(builder.cells, grid_of(builder))
    assert builder.count(BLACK) == 64


def test_normalize_single_block():
    board = DenseBoard.from_rows([
        [1, 1, 1, 1, 1, 1, 1, 0],
        [1, 2, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, 1, 2, 1, 1],
        [1, 1, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, 1, 1, 1, 2],
        [1, 1, 1, 1, 1, 1, 1, 1],
    ], k=2)
    builder = PlanBuilder(board)
    stage = normalize8(builder, grid_of(builder))
    assert blacks_of(builder) == [(2, 2), (3, 2), (4, 2)]
    assert is_normal(builder.cells, builder.bounds)
    assert builder.escorts == [(8, 8)]
    assert stage.tag == "Normalize8"


def test_margin_target_keeps_border_white():
    target = margin_target(Box(1, 1, 4, 4), 3)
    assert target.tolist() == [
        [WHITE, WHITE, WHITE, WHITE],
        [WHITE, BLACK, BLACK, WHITE],
        [WHITE, BLACK, WHITE, WHITE],
        [WHITE, WHITE, WHITE, ESCORT],
    ]
    with pytest.raises(PlanningError):
        margin_target(Box(1, 1, 4, 4), 5)


def test_merge_on_empty_board_does_nothing():
    builder = PlanBuilder(random_bgsp(16, 0, 1, seed=2))
    (rows, cols), grid = merge_pass(builder, grid_of(builder), 4)
    assert (rows.tag, cols.tag) == ("MergeRows(4)", "MergeCols(4)")
    assert (grid.columns, grid.rows) == (1, 1)
    assert builder.steps == []


def test_row_highway_joins_bottom_runs():
    builder = PlanBuilder(board_with(16, {2: [2, 3, 4, 10, 11, 12, 13]}))
    (rows, cols), _ = merge_pass(builder, grid_of(builder), 4)
    assert blacks_of(builder) == [(x, 2) for x in range(2, 9)]
    assert "highway-fallback" not in rows.flags
    assert 0 < len(rows.steps) < 100
    assert cols.steps == []


def test_column_highway_lowers_upper_run():
    builder = PlanBuilder(board_with(16, {2: [2, 3, 4, 5, 6], 10: [2, 3, 4]}))
    (rows, cols), _ = merge_pass(builder, grid_of(builder), 4)
    assert rows.steps == []
    assert blacks_of(builder) == [(x, 2) for x in range(2, 10)]
    assert "highway-fallback" not in cols.flags


def test_crowded_pair_is_joined_in_place():
    builder = PlanBuilder(board_with(16, {2: [2, 3, 4, 5, 6, 7, 10, 11, 12, 13], 3: [2, 3]}))
    (rows, cols), _ = merge_pass(builder, grid_of(builder), 4)
    assert blacks_of(builder) == [(x, 2) for x in range(2, 14)]
    assert "highway-fallback" not in rows.flags
    assert cols.steps == []


def test_final_drag_moves_whole_lines():
    board = board_with(16, {2: list(range(2, 16)), 3: [2, 3, 4]})
    builder = PlanBuilder(board)
    stage = final_drag(builder, canonical_goal(board).array)
    assert builder.board() == canonical_goal(board)
    assert stage.tag == "FinalDrag" and stage.flags == []
    assert len(stage.steps) < 100


def test_random_sparse_board_stays_on_highways():
    board = random_bgsp(32, 40, 1, seed=12)
    plan, stages = solve_bgsp_staged(board)
    assert validate_plan(board, canonical_goal(board), plan).ok
    for stage in stages:
        assert "highway-fallback" not in stage.flags and "drag-fallback" not in stage.flags


def test_solve_line_keeps_tile_order():
    board = DenseBoard.from_rows([[0, 2, 1, 0, 2]], k=2)
    goal = DenseBoard.from_rows([[2, 1, 2, 0, 0]], k=2)
    plan = solve_line(board, goal)
    assert plan.makespan == 2
    assert validate_plan(board, goal, plan).ok
    with pytest.raises(IncompatibleInstanceError):
        solve_line(board, DenseBoard.from_rows([[1, 2, 2, 0, 0]], k=2))


def test_solve_column_board():
    board = DenseBoard.from_rows([[2], [0], [1], [2]], k=2)
    plan = solve_bgsp(board, GoalSpec.explicit(DenseBoard.from_rows([[0], [2], [1], [2]], k=2)))
    assert plan.makespan == 1


@pytest.mark.parametrize("m1,m2", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_tiny_boards_validate(m1, m2):
    for blacks in range(0, m1 * m2):
        for seed in range(3):
            board = random_board(m1, m2, [m1 * m2 - 1 - blacks, blacks], 1, seed=seed)
            plan = solve_bgsp(board)
            assert validate_plan(board, canonical_goal(board), plan).ok


def test_stage_accounting_covers_plan():
    board = random_bgsp(32, 32, 1, seed=7)
    plan, stages = solve_bgsp_staged(board)
    assert validate_plan(board, canonical_goal(board), plan).ok
    assert sum(len(s.steps) for s in stages) == plan.makespan
    tags = [s.tag for s in stages]
    assert tags[0] == "Spread" and tags[1] == "Normalize8" and tags[-1] == "FinalDrag"
    assert "MergeRows(5)" in tags and "MergeCols(5)" in tags
    for stage in stages:
        assert stage.attributed_steps + stage.base_steps == len(stage.steps)


def test_dense_board_skips_to_final_drag():
    board = random_bgsp(16, 100, 1, seed=4)
    plan, stages = solve_bgsp_staged(board)
    assert stages[0].flags == ["dense"]
    assert [s.tag for s in stages] == ["Spread", "FinalDrag"]
    assert validate_plan(board, canonical_goal(board), plan).ok


def test_small_board_flag():
    _, stages = solve_bgsp_staged(random_bgsp(10, 12, 1, seed=3))
    assert stages[0].flags == ["small-board"]


def test_arbitrary_goal_is_spliced():
    start = random_bgsp(4, 5, 1, seed=1)
    goal = random_bgsp(4, 5, 1, seed=2)
    plan, stages = solve_bgsp_staged(start, GoalSpec.explicit(goal))
    assert validate_plan(start, goal, plan).ok
    assert any(s.tag.startswith("Reverse:") for s in stages)


def test_multiple_escorts_use_strips():
    assert [tuple(b) for b in strip_boxes(6, 9, 3)] == [(1, 1, 3, 6), (4, 1, 6, 6), (7, 1, 9, 6)]
    for seed in range(3):
        board = random_board(6, 9, [30, 21], 3, seed=seed)
        plan, stages = solve_bgsp_staged(board)
        assert validate_plan(board, canonical_goal(board), plan).ok
        assert [s.tag for s in stages] == ["EscortSpread", "Balance", "StripSort", "EscortWalk"]


def test_two_escorts_on_square_board():
    board = random_bgsp(8, 20, 2, seed=9)
    assert validate_plan(board, canonical_goal(board), solve_bgsp(board, p=2)).ok


def test_three_colors_reach_layered_goal():
    board = random_board(16, 16, [80, 80, 95], 1, seed=6)
    plan = solve_cgsp(board)
    assert validate_plan(board, canonical_goal(board), plan).ok


def test_three_colors_custom_order_and_escorts():
    board = random_board(6, 8, [15, 15, 16], 2, seed=8)
    order = [1, 3, 2]
    plan = solve_cgsp(board, order=order)
    assert validate_plan(board, canonical_goal(board, order), plan).ok


def test_binary_cgsp_matches_bgsp_goal():
    board = random_bgsp(5, 8, 1, seed=3)
    plan = solve_cgsp(board, order=[1, 2])
    assert validate_plan(board, canonical_goal(board, [1, 2]), plan).ok


def test_solver_rejections():
    board = random_bgsp(4, 4, 1, seed=0)
    with pytest.raises(UnsupportedError):
        solve_cgsp(board, labeled=True)
    with pytest.raises(UnsupportedError):
        solve_bgsp(random_board(4, 4, [5, 5, 5], 1, seed=0))
    with pytest.raises(BoardError):
        solve_bgsp(board, p=2)
    with pytest.raises(UnsupportedError):
        solve_bgsp(random_bgsp(6, 4, 3, seed=0, m2=4))
    with pytest.raises(IncompatibleInstanceError):
        solve_bgsp(board, GoalSpec.explicit(random_bgsp(4, 6, 1, seed=0)))


@pytest.mark.slow
def test_larger_random_instances():
    for m, blacks in ((64, 64), (64, 400), (48, 30)):
        board = random_bgsp(m, blacks, 1, seed=m + blacks)
        assert validate_plan(board, canonical_goal(board), solve_bgsp(board)).ok


def test_three_colors_stay_within_binary_bound():
    board = random_board(32, 32, [1024 - 1 - 104, 40, 64], 1, seed=21)
    plan = solve_cgsp(board)
    assert validate_plan(board, canonical_goal(board), plan).ok
    binary = DenseBoard(np.where(board.array > WHITE, BLACK, board.array).astype(np.int8), 2)
    assert plan.makespan <= 3 * solve_bgsp(binary).makespan


def test_color_passes_fill_the_seam_row():
    board = random_board(16, 16, [256 - 1 - 32, 12, 20], 1, seed=3)
    order = [3, 2, 1]
    target = canonical_goal(board, order)
    builder = PlanBuilder(board)
    sort_region(builder, builder.bounds, target.array, order)
    assert builder.board() == target
    tags = [s.tag for s in builder.stages]
    assert tags.index("Class(1)") < tags.index("Seam") < tags.index("Class(2)")
    assert tags[-1] == "FinalDrag"


@pytest.mark.slow
def test_more_escorts_shorten_the_plan():
    spans = []
    for p in (1, 2, 4):
        board = random_bgsp(128, 1448, p, seed=128)
        spans.append(solve_bgsp(board, p=p).makespan)
    assert spans[0] >= spans[1] >= spans[2]
    assert spans[2] <= 0.6 * spans[0]
