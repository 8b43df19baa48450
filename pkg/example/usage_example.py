"""
GSTP 使用示例
演示随机实例的分治求解, 小棋盘上的最优搜索, 以及 3SAT 归约的回放
"""

import logging

from src.core import canonical_goal, random_bgsp, random_board, validate_plan
from src.dnc import solve_bgsp_staged, solve_cgsp
from src.exact import bfs_optimal, lb
from src.models import CnfFormula
from src.reduction import (
    assignment_to_turns,
    build_instance,
    fresh_scg,
    satisfying_assignments,
    turns_to_plan,
)
from src.scg import play


def main():
    """主函数: 依次运行三个演示"""
    logging.basicConfig(level=logging.INFO)

    # --- 第一部分: 分治求解 64x64 随机二值实例 ---
    board = random_bgsp(64, 64, 1, seed=2024)
    plan, stages = solve_bgsp_staged(board)
    report = validate_plan(board, canonical_goal(board), plan)
    print("--- 分治求解 ---")
    print(f"makespan={plan.makespan}, 下界={lb(board)}, 校验通过={report.ok}")
    for stage in stages:
        print(stage.get_cost_summary())

    # 三色实例使用分层目标, 两个护送格
    colored = random_board(12, 12, [50, 46, 46], 2, seed=7)
    print(f"三色实例 makespan={solve_cgsp(colored).makespan}")

    # --- 第二部分: 小棋盘上的最优 makespan ---
    small = random_bgsp(3, 4, 1, seed=1, m2=4)
    optimum = bfs_optimal(small)
    print("\n--- 精确搜索 ---")
    print(f"3x4 最优 makespan={optimum.makespan}, 展开状态数={optimum.expanded}")

    # --- 第三部分: 3SAT 归约 ---
    formula = CnfFormula(num_vars=1, clauses=[[1]])
    instance, layout = build_instance(formula)
    assignment = satisfying_assignments(formula)[0]
    turns = assignment_to_turns(formula, layout, assignment)
    print("\n--- 3SAT 归约 ---")
    print(f"实例边长 m={layout.m}, 获胜回合数 w={layout.w}")
    print(f"沙堡回放结果: {play(fresh_scg(formula, layout), turns).outcome}")
    print(f"提升后的计划 makespan={turns_to_plan(layout, turns).makespan}")
    print(f"稀疏实例: {instance!r}")


if __name__ == "__main__":
    main()
