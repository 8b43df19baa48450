"""
归约实例的尺寸推导
所有层与列范围都以左下角为 (1,1) 的坐标给出, 自底向上列出
"""

import logging
from typing import Any, Dict, List

from ..core.errors import BoardError, CapExceededError
from ..models.base_models import CnfFormula, ColumnExtent, LayerExtent, ReductionLayout

logger = logging.getLogger(__name__)

DEFAULT_CAP = 30_000_000


def literal_order(num_vars: int) -> List[int]:
    """文字小工具自顶向下的顺序: x1, ¬x1, x2, ¬x2, ..."""
    order = []
    for i in range(1, num_vars + 1):
        order.extend((i, -i))
    return order


def literal_name(literal: int) -> str:
    return f"x{literal}" if literal > 0 else f"-x{-literal}"


def gravity_height(num_vars: int, h: int) -> int:
    return 2 * num_vars * (h + 1) + 6


def count_whites(f: CnfFormula, h: int, q: int) -> int:
    """G 中的白格数 w, 按层累加"""
    n, m = f.num_vars, f.num_clauses
    incidences = sum(len(set(clause)) for clause in f.clauses)
    clause_layer = 2 + 2 * n + m + q
    gadgets = 2 * n * (2 + 2 * n + m) + h * incidences
    control = 2 + 4 * n
    vacuum = 2 + 2 * n + m
    gravity = 2 + gravity_height(n, h) * (2 * n + m)
    endgame = 2
    return clause_layer + gadgets + control + vacuum + gravity + endgame


def derive_layout(f: CnfFormula, cap: int = DEFAULT_CAP) -> ReductionLayout:
    """由公式推导全部尺寸; m 超过 cap 时拒绝"""
    n, m_clauses = f.num_vars, f.num_clauses
    if n < 1 or m_clauses < 1:
        raise BoardError("公式至少需要一个变量和一个子句")
    ell = m_clauses + 2 * n + 2
    h = 2 * n * ell + 4 * n + 2
    q = ell * (4 * n * (h + 1) + 15)
    r = 4 * n * (h + 1) + h + q + 16
    c = q + m_clauses + 2 * n + 2
    m = r + 2 * r * c + 1
    if m > cap:
        raise CapExceededError(f"归约实例边长 m={m} 超过上限 {cap}")
    w = count_whites(f, h, q)

    g = gravity_height(n, h)
    spans = [
        ("endgame", 1),
        ("padding-endgame", 1),
        ("gravity", g),
        ("padding-gravity", 1),
        ("vacuum", 2),
        ("padding-vacuum", 1),
        ("control", 2),
        ("padding-control", 1),
        ("variables", 2 * n * (h + 1)),
        ("clause-padding", q),
        ("clause", h + 1),
        ("upper-boundary", 2 * r * c),
    ]
    layers = []
    y = 1
    for name, height in spans:
        layers.append(LayerExtent(name=name, y_lo=y, y_hi=y + height - 1))
        y += height
    assert y - 1 == 2 * r * c + r, "层高之和必须等于 G 的高度"

    variables = next(layer for layer in layers if layer.name == "variables")
    gadgets = []
    for index, literal in enumerate(literal_order(n)):
        y_hi = variables.y_hi - index * (h + 1)
        gadgets.append(LayerExtent(name=literal_name(literal), y_lo=y_hi - h, y_hi=y_hi))

    columns = [
        ColumnExtent(name="reward", x_lo=1, x_hi=q),
        ColumnExtent(name="clause", x_lo=q + 1, x_hi=q + m_clauses),
        ColumnExtent(name="variable", x_lo=q + m_clauses + 1, x_hi=q + m_clauses + 2 * n),
        ColumnExtent(name="state", x_lo=c - 1, x_hi=c),
    ]
    layout = ReductionLayout(
        num_vars=n, num_clauses=m_clauses, ell=ell, h=h, q=q, r=r, c=c, m=m, w=w, K=4 * w,
        layers=layers, gadgets=gadgets, columns=columns, clauses=[list(clause) for clause in f.clauses],
    )
    logger.info("归约尺寸 N=%d M=%d: r=%d c=%d m=%d w=%d", n, m_clauses, r, c, m, w)
    return layout


def layout_summary(layout: ReductionLayout) -> Dict[str, Any]:
    """供 JSON 输出的摘要"""
    return {
        "N": layout.num_vars,
        "M": layout.num_clauses,
        "ell": layout.ell,
        "h": layout.h,
        "q": layout.q,
        "r": layout.r,
        "c": layout.c,
        "m": layout.m,
        "w": layout.w,
        "K": layout.K,
        "layers": {layer.name: [layer.y_lo, layer.y_hi] for layer in layout.layers},
        "gadgets": {g.name: [g.y_lo, g.y_hi] for g in layout.gadgets},
        "columns": {col.name: [col.x_lo, col.x_hi] for col in layout.columns},
    }
