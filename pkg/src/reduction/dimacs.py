"""
DIMACS CNF 读写, 每个子句至多 3 个文字
"""

from pathlib import Path
from typing import List, Union

from ..core.errors import FormatError
from ..models.base_models import CnfFormula


def parse_dimacs(text: str) -> CnfFormula:
    """解析 `p cnf N M` 头与以 0 结尾的子句, 注释行以 c 开头"""
    num_vars = num_clauses = None
    clauses: List[List[int]] = []
    current: List[int] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf" or num_vars is not None:
                raise FormatError(f"无效的 DIMACS 头: {line}", line_no)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError(f"无效的 DIMACS 头: {line}", line_no)
            continue
        if num_vars is None:
            raise FormatError("子句出现在 `p cnf` 头之前", line_no)
        for token in line.split():
            try:
                literal = int(token)
            except ValueError:
                raise FormatError(f"无效的文字: {token}", line_no)
            if literal == 0:
                if not current:
                    raise FormatError("空子句", line_no)
                if len(current) > 3:
                    raise FormatError(f"子句有 {len(current)} 个文字, 至多允许 3 个", line_no)
                clauses.append(current)
                current = []
            elif abs(literal) > num_vars:
                raise FormatError(f"文字 {literal} 超出变量数 {num_vars}", line_no)
            else:
                current.append(literal)
    if num_vars is None:
        raise FormatError("缺少 `p cnf` 头", 1)
    if current:
        clauses.append(current)
    if len(clauses) != num_clauses:
        raise FormatError(f"声明了 {num_clauses} 个子句, 实际读到 {len(clauses)} 个", len(text.splitlines()))
    return CnfFormula(num_vars=num_vars, clauses=clauses)


def emit_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {f.num_clauses}"]
    lines.extend(" ".join(str(lit) for lit in clause) + " 0" for clause in f.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs(path: Union[str, Path]) -> CnfFormula:
    return parse_dimacs(Path(path).read_text())
