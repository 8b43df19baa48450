from .builder import build_instance, embedded_scg, instance_goal, lift_scg, rasterize_h
from .dimacs import emit_dimacs, parse_dimacs, read_dimacs
from .layout import DEFAULT_CAP, derive_layout, layout_summary, literal_name, literal_order
from .roundtrip import (
    assignment_to_turns,
    extract_assignment,
    fresh_scg,
    layout_scg,
    lift_turn,
    satisfying_assignments,
    turns_to_plan,
)

__all__ = [
    'build_instance', 'embedded_scg', 'instance_goal', 'lift_scg', 'rasterize_h',
    'emit_dimacs', 'parse_dimacs', 'read_dimacs',
    'DEFAULT_CAP', 'derive_layout', 'layout_summary', 'literal_name', 'literal_order',
    'assignment_to_turns', 'extract_assignment', 'fresh_scg', 'layout_scg', 'lift_turn', 'satisfying_assignments',
    'turns_to_plan',
]
