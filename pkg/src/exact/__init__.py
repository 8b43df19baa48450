from .bounds import BOUND_CAP_CELLS, TRANSPORT_CAP_CELLS, lb, lb_distance, lb_manhattan, lb_transport, makespan_shape
from .collapse import collapse_stats, occupancy, threshold
from .search import (
    DEFAULT_BUDGET,
    EXACT_CAP_CELLS,
    EXACT_MAX_ESCORTS,
    bfs_optimal,
    canonical_key,
    iddfs_optimal,
    legal_steps,
)

__all__ = [
    'BOUND_CAP_CELLS', 'TRANSPORT_CAP_CELLS', 'lb', 'lb_distance', 'lb_manhattan', 'lb_transport', 'makespan_shape',
    'collapse_stats', 'occupancy', 'threshold',
    'DEFAULT_BUDGET', 'EXACT_CAP_CELLS', 'EXACT_MAX_ESCORTS', 'bfs_optimal', 'canonical_key', 'iddfs_optimal',
    'legal_steps',
]
