from .board import BLACK, ESCORT, WHITE, Board, DenseBoard, SparseBoard, boards_equal, histogram
from .errors import (
    BoardError,
    CapExceededError,
    ConfigError,
    FormatError,
    GSTPError,
    IllegalMoveError,
    IncompatibleInstanceError,
    PlanningError,
    UnsupportedError,
)
from .formats import emit_instance, emit_plan, parse_instance, parse_plan, read_instance, read_plan
from .generators import random_bgsp, random_board
from .goals import canonical_goal, default_order, escort_cells, goal_board
from .moves import (
    apply_plan,
    apply_step,
    expand_step,
    invert_plan,
    invert_step,
    shifts_overlap,
    validate_generic_step,
    validate_step,
)
from .plan import check_compatible, execute_plan, validate_plan

__all__ = [
    'BLACK', 'ESCORT', 'WHITE', 'Board', 'DenseBoard', 'SparseBoard', 'boards_equal', 'histogram',
    'BoardError', 'CapExceededError', 'ConfigError', 'FormatError', 'GSTPError', 'IllegalMoveError',
    'IncompatibleInstanceError', 'PlanningError', 'UnsupportedError',
    'emit_instance', 'emit_plan', 'parse_instance', 'parse_plan', 'read_instance', 'read_plan',
    'random_bgsp', 'random_board',
    'canonical_goal', 'default_order', 'escort_cells', 'goal_board',
    'apply_plan', 'apply_step', 'expand_step', 'invert_plan', 'invert_step', 'shifts_overlap',
    'validate_generic_step', 'validate_step',
    'check_compatible', 'execute_plan', 'validate_plan',
]
