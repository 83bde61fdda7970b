"""Command-line surface: formats, determinism, exit codes."""

import json
import subprocess
import sys

from digraphdist import load_edge_list
from digraphdist.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_writes_loadable_edge_list(tmp_path, capsys):
    out = tmp_path / "g.csv"
    code, _, _ = run_cli(["gen", "--n", "60", "--p", "0.05", "--theta", "0.4",
                          "--seed", "5", "--out", str(out)], capsys)
    assert code == 0
    dg = load_edge_list(out)
    assert dg.arc_count > 0


def test_gen_keep_kinds_column(tmp_path, capsys):
    out = tmp_path / "gk.csv"
    code, _, _ = run_cli(["gen", "--n", "60", "--p", "0.05", "--theta", "0.4",
                          "--seed", "5", "--out", str(out), "--keep-kinds"], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "src,dst,kind"
    kinds = {line.rsplit(",", 1)[1] for line in lines[1:]}
    assert kinds <= {"out", "bi"}


def test_gen_deterministic_across_runs_and_threads(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli(["gen", "--n", "80", "--p", "0.04", "--theta", "0.5", "--seed", "9",
             "--out", str(a)], capsys)
    run_cli(["gen", "--n", "80", "--p", "0.04", "--theta", "0.5", "--seed", "9",
             "--out", str(b), "--threads", "4"], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_distances_histogram_format(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code, _, _ = run_cli(["distances", "--n", "120", "--m", "1.2", "--theta", "0.5",
                          "--pairs", "300", "--seed", "3", "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "d_out,d_in,count"
    total = sum(int(line.split(",")[2]) for line in lines[1:])
    assert total == 300
    assert any("inf" in line for line in lines[1:])  # subcritical model: many unreachable


def test_approx_json_fields(capsys):
    code, out, _ = run_cli(["approx", "--n", "2000", "--m", "2", "--theta", "0.5",
                            "--u1", "0", "--u2", "0", "--samples", "20000",
                            "--seed", "4"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"estimate", "std_error", "clamp_fraction", "params"}
    assert 0.0 <= payload["estimate"] <= 1.0
    assert payload["params"]["r_n"] == 9


def test_approx_undirected_mode(capsys):
    code, out, _ = run_cli(["approx", "--n", "2000", "--m", "3", "--u1", "0",
                            "--samples", "20000", "--seed", "4"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["clamp_fraction"] == 0.0


def test_compare_writes_table(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    code, meta, _ = run_cli(["compare", "--n", "500", "--m", "2", "--theta", "0.5",
                             "--u-min", "-1", "--u-max", "1", "--graph-samples", "200",
                             "--w-samples", "20000", "--seed", "6", "--out", str(out)],
                            capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 9
    assert json.loads(meta)["n"] == 500


def test_scaling_outputs_summary(tmp_path, capsys):
    out = tmp_path / "scal.csv"
    code, summary, _ = run_cli(["scaling", "--n-list", "250,500,1000", "--m", "2",
                                "--u-min", "-1", "--u-max", "1",
                                "--graph-samples", "200", "--w-samples", "20000",
                                "--seed", "7", "--out", str(out)], capsys)
    assert code == 0
    payload = json.loads(summary)
    assert "slope" in payload and "slope_se" in payload
    assert len(out.read_text().splitlines()) == 4


def test_realnet_summary_json(capsys, tmp_path):
    code, out, _ = run_cli(["realnet", "--edges", "tests/data/benchmark_edges.csv",
                            "--directed", "--seed", "8"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["n"] == 34


def test_parameter_error_exit_code(capsys, tmp_path):
    code, _, err = run_cli(["gen", "--n", "10", "--p", "1.5", "--theta", "0.5",
                            "--seed", "1", "--out", str(tmp_path / "x.csv")], capsys)
    assert code == 2
    assert "error" in err


def test_domain_error_exit_code(capsys):
    code, _, _ = run_cli(["approx", "--n", "100", "--m", "0.5", "--u1", "0",
                          "--samples", "10", "--seed", "1"], capsys)
    assert code == 2


def test_io_error_exit_code(capsys):
    code, _, err = run_cli(["realnet", "--edges", "/nonexistent.csv", "--seed", "1"],
                           capsys)
    assert code == 3
    assert "i/o" in err


def test_module_invocation_round_trip(tmp_path):
    out = tmp_path / "m.csv"
    cmd = [sys.executable, "-m", "digraphdist", "gen", "--n", "30", "--p", "0.1",
           "--theta", "0.3", "--seed", "2", "--out", str(out)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0
    assert out.read_text().startswith("src,dst")
