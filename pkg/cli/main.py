#!/usr/bin/env python3
"""
gstp 命令行入口
退出码: 0 成功, 2 校验失败, 3 解析错误, 4 超出资源上限
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from src.core import (
    CapExceededError,
    ConfigError,
    FormatError,
    GSTPError,
    canonical_goal,
    emit_instance,
    emit_plan,
    random_board,
    read_instance,
    read_plan,
    validate_plan,
)
from src.core.formats import write_instance
from src.dnc import solve_bgsp_staged, solve_cgsp
from src.exact import bfs_optimal, collapse_stats, lb, lb_distance, lb_manhattan, lb_transport
from src.models import GoalSpec, StagePlan
from src.reduction import build_instance, instance_goal, layout_summary, read_dimacs
from src.scg import bounded_search, emit_scg, emit_turns, play, random_scg, read_scg, read_turns

from .bench import run_bench, sweep
from .config import GSTPConfig
from .render import render_frames, stage_boundaries

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FORMAT = 3
EXIT_CAP = 4


class InvalidResult(Exception):
    """校验未通过, 以退出码 2 结束"""


def emit(record: Dict[str, Any]) -> None:
    """单行 JSON 输出"""
    print(json.dumps(record, ensure_ascii=False, separators=(",", ":")))


def _write_or_print(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _goal(args, board):
    if getattr(args, "goal", None):
        return read_instance(args.goal)
    return canonical_goal(board, args.order or None)


def cmd_gen(args) -> int:
    board = random_board(args.m1, args.m2, args.counts, args.p, args.seed)
    _write_or_print(emit_instance(board, args.form), args.out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    formula = read_dimacs(args.dimacs)
    board, layout = build_instance(formula, cap=GSTPConfig.CAP_CELLS)
    write_instance(board, args.out, "sparse")
    if args.goal_out:
        write_instance(instance_goal(board), args.goal_out, "sparse")
    summary = layout_summary(layout)
    if args.layout:
        Path(args.layout).write_text(layout.model_dump_json(indent=2), encoding="utf-8")
    emit(summary)
    return EXIT_OK


def _write_stages(stages: List[StagePlan], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["stage", "steps", "attributed", "base", "attributed_per_black"])
        writer.writeheader()
        for stage in stages:
            writer.writerow(stage.get_cost_summary())


def _solve(args, board, goal) -> tuple:
    if args.algo == "exact":
        result = bfs_optimal(board, GoalSpec.explicit(goal), p=args.p,
                             cap=GSTPConfig.EXACT_CAP_CELLS, max_escorts=GSTPConfig.EXACT_MAX_ESCORTS)
        if result.status == "exhausted":
            raise CapExceededError(f"精确搜索在展开 {result.expanded} 个状态后用尽预算")
        if result.status == "unreachable":
            raise InvalidResult("目标局面不可达")
        return result.plan, []
    if board.k > 2:
        # 多色求解只支持分层目标
        if args.goal:
            raise InvalidResult("多色实例只支持分层目标, 请用 --order 代替 --goal")
        return solve_cgsp(board, args.order or None, p=args.p, cap=GSTPConfig.SOLVER_DENSE_CAP), []
    return solve_bgsp_staged(board, GoalSpec.explicit(goal), p=args.p, cap=GSTPConfig.SOLVER_DENSE_CAP)


def cmd_solve(args) -> int:
    board = read_instance(args.instance)
    goal = _goal(args, board)
    plan, stages = _solve(args, board, goal)
    report = validate_plan(board, goal, plan)
    if not report.ok:
        raise InvalidResult(f"求解器输出的计划未通过校验: {report.message}")
    _write_or_print(emit_plan(plan), args.out)
    if args.stages:
        _write_stages(stages, args.stages)
    if args.out:
        emit({"algo": args.algo, "makespan": plan.makespan, "stages": len(stages)})
    return EXIT_OK


def cmd_verify(args) -> int:
    board = read_instance(args.instance)
    report = validate_plan(board, _goal(args, board), read_plan(args.plan))
    emit(report.model_dump())
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_lb(args) -> int:
    board = read_instance(args.instance)
    goal = _goal(args, board)
    cap = GSTPConfig.DENSE_CAP_CELLS
    record = {
        "lb_distance": lb_distance(board, goal, cap=cap),
        "lb_manhattan": lb_manhattan(board, goal, p=args.p, cap=cap),
    }
    if args.transport:
        record["lb_transport"] = lb_transport(board, goal, p=args.p)
    record["lb"] = lb(board, goal, p=args.p, exact_transport=args.transport, cap=cap)
    emit(record)
    return EXIT_OK


def cmd_scg(args) -> int:
    if args.scg_command == "play":
        result = play(read_scg(args.board), read_turns(args.turns))
        emit(result.model_dump())
        return EXIT_OK if result.outcome == "win" else EXIT_INVALID
    if args.random:
        board = random_scg(args.random[0], args.random[1], args.density, args.seed)
        sys.stdout.write(emit_scg(board))
    elif args.board:
        board = read_scg(args.board)
    else:
        raise InvalidResult("需要网格文件或 --random R C")
    turns = bounded_search(board, max_nodes=args.max_nodes)
    emit({"winnable": turns is not None, "turns": len(turns) if turns is not None else None})
    if turns is not None and args.out:
        Path(args.out).write_text(emit_turns(turns), encoding="utf-8")
    return EXIT_OK


def cmd_stats(args) -> int:
    stats = collapse_stats(args.side, args.samples, args.trials, args.seed, max_p=args.max_p)
    emit(stats.model_dump())
    return EXIT_OK


def cmd_bench(args) -> int:
    cells = sweep(args.m, args.r, args.p, args.seeds, args.algo)
    records = run_bench(cells, args.out, jobs=args.jobs, since=args.since)
    failed = sum(1 for r in records if r.status != "ok")
    emit({"rows": len(records), "failed": failed, "out": args.out})
    return EXIT_OK


def cmd_render(args) -> int:
    board = read_instance(args.instance)
    plan, keyframes = None, None
    if args.plan:
        plan = read_plan(args.plan)
    elif args.solve:
        plan, stages = solve_bgsp_staged(board, cap=GSTPConfig.SOLVER_DENSE_CAP)
        if args.keyframes:
            keyframes = stage_boundaries(stages)
    viewport = tuple(args.viewport) if args.viewport else None
    for frame in render_frames(board, plan, viewport, keyframes):
        print(frame)
        print()
    return EXIT_OK


def cmd_config(args) -> int:
    errors = GSTPConfig.validate_config()
    emit({"config": GSTPConfig.get_config_summary(), "errors": errors})
    return EXIT_INVALID if errors else EXIT_OK


def _add_goal_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--goal", help="显式目标实例文件, 默认为规范分层目标")
    parser.add_argument("--order", type=int, nargs="+", help="颜色自底向上的顺序")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gstp", description="彩色广义滑块拼图工具")
    parser.add_argument("-v", "--verbose", action="store_true", help="输出调试日志")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="生成随机实例")
    gen.add_argument("--m1", type=int, required=True, help="行数")
    gen.add_argument("--m2", type=int, required=True, help="列数")
    gen.add_argument("--counts", type=int, nargs="+", required=True, help="各颜色瓦片数, 颜色 1 在前")
    gen.add_argument("--p", type=int, default=1, help="护送格数")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--form", choices=["dense", "sparse"], default="dense")
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    reduce = sub.add_parser("reduce", help="把 DIMACS 公式归约为实例")
    reduce.add_argument("dimacs")
    reduce.add_argument("--out", required=True, help="实例输出路径")
    reduce.add_argument("--goal-out", help="目标实例输出路径")
    reduce.add_argument("--layout", help="布局 JSON 输出路径")
    reduce.set_defaults(func=cmd_reduce)

    solve = sub.add_parser("solve", help="求解实例并输出计划")
    solve.add_argument("instance")
    solve.add_argument("--algo", choices=["dnc", "exact"], default="dnc")
    solve.add_argument("--p", type=int, help="护送格数, 须与棋盘一致")
    solve.add_argument("--out", help="计划输出路径")
    solve.add_argument("--stages", help="阶段代价 CSV 输出路径")
    _add_goal_options(solve)
    solve.set_defaults(func=cmd_solve)

    verify = sub.add_parser("verify", help="校验计划")
    verify.add_argument("instance")
    verify.add_argument("plan")
    _add_goal_options(verify)
    verify.set_defaults(func=cmd_verify)

    bound = sub.add_parser("lb", help="计算 makespan 下界")
    bound.add_argument("instance")
    bound.add_argument("--p", type=int)
    bound.add_argument("--transport", action="store_true", help="加入最小费用匹配下界")
    _add_goal_options(bound)
    bound.set_defaults(func=cmd_lb)

    scg = sub.add_parser("scg", help="沙堡坍缩游戏")
    scg_sub = scg.add_subparsers(dest="scg_command", required=True)
    scg_play = scg_sub.add_parser("play", help="回放回合序列")
    scg_play.add_argument("board")
    scg_play.add_argument("turns")
    scg_check = scg_sub.add_parser("check", help="小网格上搜索获胜序列")
    scg_check.add_argument("board", nargs="?")
    scg_check.add_argument("--random", type=int, nargs=2, metavar=("R", "C"), help="随机生成网格代替文件")
    scg_check.add_argument("--density", type=float, default=0.3, help="随机网格中洞的比例")
    scg_check.add_argument("--seed", type=int, default=0)
    scg_check.add_argument("--max-nodes", type=int, default=100_000)
    scg_check.add_argument("--out", help="获胜回合输出路径")
    scg.set_defaults(func=cmd_scg)

    stats = sub.add_parser("stats", help="统计实验")
    stats_sub = stats.add_subparsers(dest="stats_command", required=True)
    collapse = stats_sub.add_parser("collapse", help="随机网格的行列占用统计")
    collapse.add_argument("--side", type=int, default=64)
    collapse.add_argument("--samples", type=int, default=64)
    collapse.add_argument("--trials", type=int, default=1000)
    collapse.add_argument("--seed", type=int, default=0)
    collapse.add_argument("--max-p", type=int, default=8)
    stats.set_defaults(func=cmd_stats)

    bench = sub.add_parser("bench", help="扫描 (m, r, p) 网格运行求解器")
    bench.add_argument("--m", type=int, nargs="*", default=[], help="棋盘边长")
    bench.add_argument("--r", type=float, nargs="*", default=[1.0], help="黑格数 B = m^r")
    bench.add_argument("--p", type=int, nargs="*", default=[1])
    bench.add_argument("--seeds", type=int, nargs="*", default=[0])
    bench.add_argument("--algo", nargs="+", choices=["dnc", "exact"], default=["dnc"])
    bench.add_argument("--jobs", type=int, default=GSTPConfig.DEFAULT_JOBS)
    bench.add_argument("--since", help="早于该时间的已完成行会重新运行")
    bench.add_argument("--out", required=True)
    bench.set_defaults(func=cmd_bench)

    render = sub.add_parser("render", help="ASCII 帧")
    render.add_argument("instance")
    source = render.add_mutually_exclusive_group()
    source.add_argument("--plan", help="回放的计划文件")
    source.add_argument("--solve", action="store_true", help="用分治求解器生成计划")
    render.add_argument("--keyframes", action="store_true", help="只渲染阶段边界 (配合 --solve)")
    render.add_argument("--viewport", type=int, nargs=4, metavar=("X1", "Y1", "X2", "Y2"))
    render.set_defaults(func=cmd_render)

    config = sub.add_parser("config", help="显示当前配置")
    config.set_defaults(func=cmd_config)
    return parser


EXIT_CODES = [
    (FormatError, EXIT_FORMAT),
    (CapExceededError, EXIT_CAP),
    (GSTPError, EXIT_INVALID),
    (InvalidResult, EXIT_INVALID),
    (FileNotFoundError, EXIT_FORMAT),
]


def main(argv: Optional[List[str]] = None) -> int:
    try:
        GSTPConfig.reload()
    except ConfigError as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_INVALID
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else GSTPConfig.LOG_LEVEL
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")
    handler: Callable[[argparse.Namespace], int] = args.func
    logger.debug("命令 %s", args.command)
    try:
        return handler(args)
    except tuple(exc for exc, _ in EXIT_CODES) as e:
        code = next(c for exc, c in EXIT_CODES if isinstance(e, exc))
        print(f"错误: {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
