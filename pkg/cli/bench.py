"""
基准测试: 在 (m, r, p, seed) 网格上运行求解器与下界, 结果追加到 CSV
已完成的行按 (m1, m2, k, B, p, seed, algorithm) 跳过, 中断后可继续
"""

import csv
import json
import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from src.core import GSTPError, canonical_goal, random_bgsp, validate_plan
from src.dnc import solve_bgsp_staged
from src.exact import bfs_optimal, lb
from src.models import BenchRecord
from src.utils import error_cell, parse_since, records_since

logger = logging.getLogger(__name__)

ALGORITHMS = ("dnc", "exact")
COLUMNS = [
    "m1", "m2", "k", "B", "p", "seed", "algorithm", "lower_bound", "makespan", "wall_time",
    "ratio", "status", "error", "started_at", "stages",
]

Key = Tuple[int, int, int, int, int, int, str]


def blacks_for(m: int, r: float, p: int) -> int:
    """B = round(m^r), 不超过可放置的瓦片数"""
    return max(0, min(round(m ** r), m * m - p))


def ratio_denominator(m: int, blacks: int) -> float:
    """m log2 m + B log2 B"""
    head = m * math.log2(m) if m > 1 else 0.0
    tail = blacks * math.log2(blacks) if blacks > 1 else 0.0
    return head + tail


def sweep(ms: Sequence[int], rs: Sequence[float], ps: Sequence[int], seeds: Sequence[int],
          algorithms: Sequence[str] = ("dnc",)) -> List[Dict[str, Union[int, str]]]:
    """展开扫描网格; 同一 (m, B) 只保留一次"""
    cells, seen = [], set()
    for m, r, p, seed, algorithm in product(ms, rs, ps, seeds, algorithms):
        if algorithm not in ALGORITHMS:
            raise ValueError(f"未知的算法 {algorithm}")
        cell = {"m": m, "B": blacks_for(m, r, p), "p": p, "seed": seed, "algorithm": algorithm}
        key = tuple(cell.values())
        if key not in seen:
            seen.add(key)
            cells.append(cell)
    return cells


def cell_key(cell: Dict[str, Union[int, str]]) -> Key:
    m = int(cell["m"])
    return (m, m, 2, int(cell["B"]), int(cell["p"]), int(cell["seed"]), str(cell["algorithm"]))


def run_cell(m: int, B: int, p: int, seed: int, algorithm: str) -> BenchRecord:
    """运行一行; 求解失败记录为 failed, 低于下界的 makespan 直接抛出"""
    board = random_bgsp(m, B, p, seed)
    bound = lb(board, p=p)
    started = time.perf_counter()
    makespan, stages, status, error = None, {}, "ok", None
    try:
        if algorithm == "exact":
            result = bfs_optimal(board, p=p)
            if result.status != "optimal":
                raise GSTPError(f"精确搜索未得到最优解: {result.status}")
            plan = result.plan
        else:
            plan, staged = solve_bgsp_staged(board, p=p)
            for stage in staged:
                stages[stage.tag] = stages.get(stage.tag, 0) + len(stage.steps)
        report = validate_plan(board, canonical_goal(board), plan)
        if not report.ok:
            raise GSTPError(f"计划未通过校验: {report.message}")
        makespan = plan.makespan
    except GSTPError as e:
        status, error = "failed", error_cell(e)
        logger.warning("基准行 m=%d B=%d p=%d seed=%d 失败: %s", m, B, p, seed, e)
    wall = time.perf_counter() - started
    denominator = ratio_denominator(m, B)
    ratio = makespan / denominator if makespan is not None and denominator > 0 else None
    return BenchRecord(m1=m, m2=m, k=2, B=B, p=p, seed=seed, algorithm=algorithm, lower_bound=bound,
                       makespan=makespan, wall_time=round(wall, 6), ratio=ratio, stages=stages,
                       status=status, error=error)


def record_row(record: BenchRecord) -> Dict[str, Union[int, float, str, None]]:
    row = record.model_dump(exclude={"stages"})
    row["stages"] = json.dumps(record.stages, separators=(",", ":"))
    return row


def load_completed(path: Union[str, Path], since: Optional[str] = None) -> Set[Key]:
    """已成功完成的行的键; since 之前的记录不算完成"""
    cutoff = parse_since(since)
    path = Path(path)
    if not path.exists() or path.stat().st_size == 0:
        return set()
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.DictReader(fh) if row.get("status") == "ok"]
    rows = records_since(rows, cutoff)
    return {
        (int(r["m1"]), int(r["m2"]), int(r["k"]), int(r["B"]), int(r["p"]), int(r["seed"]), r["algorithm"])
        for r in rows
    }


class BenchWriter:
    """串行化的 CSV 追加写入"""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._lock = threading.Lock()
        if not self.path.exists() or self.path.stat().st_size == 0:
            with self.path.open("w", newline="", encoding="utf-8") as fh:
                csv.DictWriter(fh, fieldnames=COLUMNS).writeheader()

    def write(self, record: BenchRecord) -> None:
        with self._lock, self.path.open("a", newline="", encoding="utf-8") as fh:
            csv.DictWriter(fh, fieldnames=COLUMNS).writerow(record_row(record))


def run_bench(cells: Sequence[Dict[str, Union[int, str]]], out: Union[str, Path], jobs: int = 1,
              since: Optional[str] = None) -> List[BenchRecord]:
    """并发运行未完成的行, 按扫描顺序写出"""
    writer = BenchWriter(out)
    done = load_completed(out, since)
    todo = [c for c in cells if cell_key(c) not in done]
    logger.info("基准: %d 行, 跳过已完成 %d 行", len(todo), len(cells) - len(todo))
    records = []
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [
            pool.submit(run_cell, int(c["m"]), int(c["B"]), int(c["p"]), int(c["seed"]), str(c["algorithm"]))
            for c in todo
        ]
        for future in futures:
            record = future.result()
            writer.write(record)
            logger.debug("基准行 %s 开始于 %s, 状态 %s", record.key, record.started_at, record.status)
            records.append(record)
    return records
