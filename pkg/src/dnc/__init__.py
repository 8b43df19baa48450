from .planner import Box, PlanBuilder, StuckError, find_route, joint_route, move_tile, rotate_ring, window_search
from .region import RegionSorter, packed_target
from .solver import DENSE_CAP, solve_bgsp, solve_bgsp_staged, solve_cgsp, solve_line, sort_region, strip_boxes
from .stages import (
    SMALL_BOARD,
    BlockGrid,
    block_counts,
    density_ok,
    final_drag,
    is_normal,
    margin_target,
    merge_columns,
    merge_pass,
    merge_rows,
    normalize8,
    sort_binary,
    spread,
)

__all__ = [
    'Box', 'PlanBuilder', 'StuckError', 'find_route', 'joint_route', 'move_tile', 'rotate_ring', 'window_search',
    'RegionSorter', 'packed_target',
    'DENSE_CAP', 'solve_bgsp', 'solve_bgsp_staged', 'solve_cgsp', 'solve_line', 'sort_region', 'strip_boxes',
    'SMALL_BOARD', 'BlockGrid', 'block_counts', 'density_ok', 'final_drag', 'is_normal', 'margin_target',
    'merge_columns', 'merge_pass', 'merge_rows', 'normalize8', 'sort_binary', 'spread',
]
