"""
网格坍缩统计
在 g x g 网格上有放回地抽取 B' 个黑格, 统计恰含 p 个黑格的行数与列数 X_p
"""

import logging
import math

import numpy as np

from ..core.errors import BoardError
from ..models.base_models import CollapseStats

logger = logging.getLogger(__name__)


def occupancy(positions: np.ndarray, side: int, max_p: int) -> np.ndarray:
    """X_p 计数, 下标 p 为恰含 p 个样本的线数"""
    per_line = np.bincount(positions, minlength=side)
    return np.bincount(per_line, minlength=max_p + 1)


def _weighted(counts: np.ndarray) -> int:
    """sum p * X_p"""
    return int((np.arange(len(counts)) * counts).sum())


def threshold(p: int, samples: int, side: int) -> float:
    """X_p 的高概率上界 2p c^(p-1) B' / sqrt(p!), 其中 c = B'/g 为每条线上的平均样本数"""
    c = samples / side
    return 2 * p * c ** (p - 1) * samples / math.sqrt(math.factorial(p))


def collapse_stats(side: int, samples: int, trials: int, seed: int, max_p: int = 8) -> CollapseStats:
    if side < 1 or samples < 1 or trials < 1 or max_p < 1:
        raise BoardError("网格边长, 样本数与试验次数都必须至少为 1")
    rng = np.random.default_rng(seed)
    bounds = {p: threshold(p, samples, side) for p in range(1, max_p + 1)}
    rows_sum = np.zeros(max_p + 1)
    cols_sum = np.zeros(max_p + 1)
    passes = np.zeros(max_p + 1, dtype=np.int64)
    identity = 0
    for _ in range(trials):
        xs = rng.integers(0, side, size=samples)
        ys = rng.integers(0, side, size=samples)
        cols = occupancy(xs, side, max_p)
        rows = occupancy(ys, side, max_p)
        if _weighted(cols) == samples and _weighted(rows) == samples:
            identity += 1
        cols_sum += cols[:max_p + 1]
        rows_sum += rows[:max_p + 1]
        for p, bound in bounds.items():
            if cols[p] <= bound and rows[p] <= bound:
                passes[p] += 1
    stats = CollapseStats(
        grid_side=side,
        samples=samples,
        trials=trials,
        seed=seed,
        max_p=max_p,
        mean_rows={p: float(rows_sum[p] / trials) for p in range(1, max_p + 1)},
        mean_cols={p: float(cols_sum[p] / trials) for p in range(1, max_p + 1)},
        thresholds=bounds,
        pass_fraction={p: float(passes[p] / trials) for p in range(1, max_p + 1)},
        identity_fraction=identity / trials,
    )
    logger.info("坍缩统计 g=%d B'=%d trials=%d: 最低通过率 %.3f", side, samples, trials,
                min(stats.pass_fraction.values()))
    return stats
