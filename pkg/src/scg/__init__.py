from .formats import emit_scg, emit_turns, parse_scg, parse_turns, read_scg, read_turns
from .game import (
    HOLE,
    SAND,
    ScgBoard,
    bounded_search,
    collapse,
    collapse_inplace,
    open_tiles,
    play,
    random_scg,
    settle,
)

__all__ = [
    'HOLE', 'SAND', 'ScgBoard', 'bounded_search', 'collapse', 'collapse_inplace', 'open_tiles',
    'play', 'random_scg', 'settle',
    'emit_scg', 'emit_turns', 'parse_scg', 'parse_turns', 'read_scg', 'read_turns',
]
