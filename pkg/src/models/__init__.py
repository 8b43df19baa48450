from .base_models import (
    Axis,
    BenchRecord,
    CnfFormula,
    CollapseStats,
    ColumnExtent,
    Corner,
    GoalSpec,
    LayerExtent,
    LineShift,
    Plan,
    PlayResult,
    ReductionLayout,
    SearchResult,
    StagePlan,
    Turn,
    Step,
    ViolationReport,
)

__all__ = [
    'Axis', 'BenchRecord', 'CnfFormula', 'CollapseStats', 'ColumnExtent', 'Corner', 'GoalSpec',
    'LayerExtent', 'LineShift', 'Plan', 'PlayResult', 'ReductionLayout', 'SearchResult',
    'StagePlan', 'Step', 'Turn', 'ViolationReport',
]
