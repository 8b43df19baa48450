"""
命令行, 基准与渲染测试
"""

import csv
import json
import math

import pytest

from cli.bench import COLUMNS, blacks_for, run_bench, sweep
from cli.config import GSTPConfig
from cli.main import main
from cli.render import render_frames, stage_boundaries
from src.core import BLACK, BoardError, ConfigError, FormatError, parse_instance, random_bgsp, read_instance, read_plan
from src.dnc import solve_bgsp_staged
from src.models import Plan
from src.utils import ERROR_CELL_LIMIT, error_cell, parse_since, records_since

CORNER = "gstp 1 2 2 2\ndense\nba\n.a\n"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def last_json(capsys):
    out = capsys.readouterr().out.strip().splitlines()
    return json.loads(out[-1])


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.gstp", tmp_path / "b.gstp"
    args = ["gen", "--m1", "16", "--m2", "16", "--counts", "239", "16", "--p", "1", "--seed", "7"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    board = read_instance(a)
    assert board.histogram()[BLACK] == 16
    assert len(board.escorts) == 1


def test_gen_rejects_bad_counts(capsys):
    assert main(["gen", "--m1", "2", "--m2", "2", "--counts", "1", "1", "--p", "1"]) == 2
    assert "错误" in capsys.readouterr().err


def test_solve_then_verify(tmp_path, capsys):
    instance = tmp_path / "board.gstp"
    main(["gen", "--m1", "6", "--m2", "7", "--counts", "30", "11", "--seed", "2", "--out", str(instance)])
    plan, stages = tmp_path / "plan.txt", tmp_path / "stages.csv"
    assert main(["solve", str(instance), "--out", str(plan), "--stages", str(stages)]) == 0
    assert last_json(capsys)["makespan"] == read_plan(plan).makespan
    assert main(["verify", str(instance), str(plan)]) == 0
    assert last_json(capsys)["ok"] is True
    with stages.open(encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert sum(int(r["steps"]) for r in rows) == read_plan(plan).makespan


def test_exact_solve_and_failed_verify(tmp_path, capsys):
    instance = write(tmp_path, "corner.gstp", CORNER)
    plan = tmp_path / "plan.txt"
    assert main(["solve", instance, "--algo", "exact", "--out", str(plan)]) == 0
    assert read_plan(plan).makespan == 2
    wrong = write(tmp_path, "wrong.txt", "t0: C 1 1 2\n")
    assert main(["verify", instance, wrong]) == 2
    assert last_json(capsys)["ok"] is False


def test_exit_codes_for_format_and_cap(tmp_path):
    assert main(["verify", write(tmp_path, "bad.gstp", "gstp 2 2 2 2\ndense\nba\n.a\n"),
                 write(tmp_path, "p.txt", "")]) == 3
    big = tmp_path / "big.gstp"
    main(["gen", "--m1", "4", "--m2", "4", "--counts", "8", "7", "--out", str(big)])
    assert main(["solve", str(big), "--algo", "exact"]) == 4
    assert main(["verify", str(tmp_path / "missing.gstp"), str(tmp_path / "missing.txt")]) == 3


def test_lb_command(tmp_path, capsys):
    instance = write(tmp_path, "c.gstp", "gstp 1 4 4 2\ndense\nbaa.\naaaa\naaaa\naaaa\n")
    assert main(["lb", instance, "--transport"]) == 0
    record = last_json(capsys)
    assert record == {"lb_distance": 3, "lb_manhattan": 1, "lb_transport": 2, "lb": 3}


def test_reduce_writes_golden_instance(tmp_path, data_dir, capsys):
    dimacs = write(tmp_path, "x1.cnf", "p cnf 1 1\n1 0\n")
    out, layout = tmp_path / "x1.gstp", tmp_path / "layout.json"
    assert main(["reduce", dimacs, "--out", str(out), "--layout", str(layout)]) == 0
    assert out.read_text(encoding="utf-8") == (data_dir / "reduction_n1_m1.gstp").read_text(encoding="utf-8")
    summary = last_json(capsys)
    assert (summary["ell"], summary["h"], summary["q"], summary["r"], summary["c"], summary["m"]) == \
        (5, 16, 415, 515, 420, 433116)
    assert json.loads(layout.read_text(encoding="utf-8"))["m"] == 433116


def test_scg_commands(tmp_path, capsys):
    board = write(tmp_path, "g.scg", "scg 1 2 2\n#o\n#o\n")
    assert main(["scg", "play", board, write(tmp_path, "t.txt", "1 1\n1 2\n")]) == 0
    assert last_json(capsys)["outcome"] == "win"
    turns = tmp_path / "found.txt"
    assert main(["scg", "check", board, "--out", str(turns)]) == 0
    assert last_json(capsys) == {"winnable": True, "turns": 2}
    assert main(["scg", "play", board, str(turns)]) == 0
    assert main(["scg", "check", write(tmp_path, "l.scg", "scg 1 1 2\no#\n")]) == 0
    assert last_json(capsys)["winnable"] is False


def test_stats_collapse_command(capsys):
    assert main(["stats", "collapse", "--side", "8", "--samples", "4", "--trials", "10", "--seed", "3"]) == 0
    record = last_json(capsys)
    assert record["identity_fraction"] == 1.0
    assert record["grid_side"] == 8


def test_config_command(monkeypatch, capsys):
    assert main(["config"]) == 0
    assert last_json(capsys)["config"]["caps"]["exact_cap_cells"] == GSTPConfig.EXACT_CAP_CELLS
    monkeypatch.setenv("GSTP_EXACT_CAP_CELLS", "0")
    try:
        assert main(["config"]) == 2
        assert last_json(capsys)["errors"]
    finally:
        monkeypatch.delenv("GSTP_EXACT_CAP_CELLS")
        GSTPConfig.reload()


def test_malformed_env_value_is_a_config_error(monkeypatch, capsys):
    monkeypatch.setenv("GSTP_EXACT_CAP_CELLS", "many")
    try:
        with pytest.raises(ConfigError, match="GSTP_EXACT_CAP_CELLS"):
            GSTPConfig.reload()
        assert main(["config"]) == 2
        assert "GSTP_EXACT_CAP_CELLS" in capsys.readouterr().err
    finally:
        monkeypatch.delenv("GSTP_EXACT_CAP_CELLS")
        GSTPConfig.reload()
    assert GSTPConfig.EXACT_CAP_CELLS > 0


def test_render_identity_and_shift(tmp_path, capsys):
    instance = write(tmp_path, "i.gstp", CORNER)
    assert main(["render", instance]) == 0
    frames = capsys.readouterr().out.strip().split("\n\n")
    assert frames == ["# t=0\nba\n.a"]
    line = parse_instance("gstp 1 1 3 2\ndense\n.ba\n")
    plan = Plan.model_validate({"steps": [{"shifts": [{"axis": "R", "index": 1, "origin": 1, "target": 2}]}]})
    assert list(render_frames(line, plan)) == ["# t=0\n.ba", "# t=1\nb.a"]


def test_render_needs_viewport_for_sparse():
    sparse = parse_instance(CORNER).to_sparse()
    with pytest.raises(BoardError):
        list(render_frames(sparse))
    assert list(render_frames(sparse, viewport=(1, 1, 2, 1))) == ["# t=0\n.a"]
    with pytest.raises(BoardError):
        list(render_frames(sparse, viewport=(1, 1, 3, 1)))


def test_keyframes_follow_stage_boundaries():
    board = random_bgsp(8, 5, 1, seed=3)
    plan, stages = solve_bgsp_staged(board)
    marks = stage_boundaries(stages)
    assert marks[-1] == plan.makespan
    frames = list(render_frames(board, plan, keyframes=marks))
    assert len(frames) == len(set(marks) | {0})


def test_bench_empty_sweep_writes_header(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8").strip() == ",".join(COLUMNS)


def test_bench_rows_and_resume(tmp_path):
    out = tmp_path / "bench.csv"
    cells = sweep([16, 32], [1.0], [1], [0])
    assert [c["B"] for c in cells] == [16, 32]
    records = run_bench(cells, out, jobs=2)
    assert [r.m1 for r in records] == [16, 32]
    for record in records:
        assert record.status == "ok"
        assert record.makespan >= record.lower_bound
        assert math.isfinite(record.ratio) and record.ratio > 0
        assert sum(record.stages.values()) == record.makespan
    assert run_bench(cells, out, jobs=2) == []
    with out.open(encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert json.loads(rows[0]["stages"])["FinalDrag"] >= 0


def test_bench_records_failures_and_reruns_stale_rows(tmp_path):
    out = tmp_path / "bench.csv"
    records = run_bench(sweep([4], [1.0], [1], [0], ["exact"]), out)
    assert records[0].status == "failed" and records[0].makespan is None
    assert "精确搜索" in records[0].error
    cells = sweep([8], [1.0], [1], [1])
    run_bench(cells, out)
    assert run_bench(cells, out, since="2999-01-01") != []
    assert blacks_for(4, 2.0, 1) == 15


@pytest.mark.slow
def test_bench_scaling_sweep(tmp_path):
    cells = sweep([32, 64, 128], [1.0], [1], [0])
    records = run_bench(cells, tmp_path / "scale.csv", jobs=2)
    assert [r.status for r in records] == ["ok"] * 3
    per_m = [r.makespan / (r.m1 * math.log2(r.m1)) for r in records]
    assert max(per_m) / min(per_m) < 2
    assert all(b <= a * 1.5 for a, b in zip(per_m, per_m[1:]))


def test_since_filter_and_error_cell():
    rows = [{"started_at": "2024-01-01T00:00:00"}, {"started_at": "2025-06-01T12:00:00+00:00"}, {}]
    assert records_since(rows, None) == rows
    assert records_since(rows, parse_since("2024-12-31")) == [rows[1]]
    assert parse_since("") is None
    assert error_cell(BoardError("第 3 行:\n  坐标越界")) == "BoardError: 第 3 行: 坐标越界"
    assert error_cell(ValueError()) == "ValueError"
    long = error_cell(BoardError("x" * 500))
    assert len(long) == ERROR_CELL_LIMIT + 3 and long.endswith("...")


def test_bench_rejects_malformed_since(tmp_path, capsys):
    with pytest.raises(FormatError):
        parse_since("not a time")
    out = tmp_path / "bench.csv"
    assert main(["bench", "--out", str(out), "--since", "not a time"]) == 3
    assert "--since" in capsys.readouterr().err
