import json
import subprocess
import sys

import pytest

from cifly import causal

DSEP_DEMO_GRAPH = {"p": 5, "edges": {"-->": [[0, 1], [2, 1], [2, 3], [1, 4]]}}
DSEP_DEMO_SETS = {"X": [0], "Z": 4}
IV_B_GRAPH = {
    "p": 7,
    "edges": {"-->": [[0, 1], [1, 2], [2, 3], [4, 0], [4, 5], [5, 6], [6, 1]],
              "<->": [[0, 2], [6, 2]]},
}
UNSOUND_GRAPH = {
    "p": 5,
    "edges": {"-->": [[0, 1], [1, 2], [0, 3], [1, 4], [4, 3]], "<->": []},
}


def run_cli(*args, expect_code=0):
    proc = subprocess.run([sys.executable, "-m", "cifly.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == expect_code, proc.stderr or proc.stdout
    return proc.stdout


@pytest.fixture
def fixtures(tmp_path):
    paths = {}
    for name, obj in [("dsep_demo_graph", DSEP_DEMO_GRAPH), ("dsep_demo_sets", DSEP_DEMO_SETS),
                      ("iv_b_graph", IV_B_GRAPH), ("unsound_graph", UNSOUND_GRAPH)]:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(obj))
        paths[name] = str(path)
    table_path = tmp_path / "dsep.txt"
    table_path.write_text(causal.table_text("dag_dsep"))
    paths["dsep_table"] = str(table_path)
    return paths


def test_reach_golden(fixtures):
    out = run_cli("reach", "--graph", fixtures["dsep_demo_graph"],
                  "--sets", fixtures["dsep_demo_sets"], "--table", fixtures["dsep_table"])
    assert json.loads(out) == {"result": [0, 1, 2, 3, 4]}


def test_reach_byte_stable(fixtures):
    args = ("reach", "--graph", fixtures["dsep_demo_graph"],
            "--sets", fixtures["dsep_demo_sets"], "--table", fixtures["dsep_table"])
    assert run_cli(*args) == run_cli(*args)


def test_reach_states_flag(fixtures):
    out = json.loads(run_cli("reach", "--graph", fixtures["dsep_demo_graph"],
                             "--sets", fixtures["dsep_demo_sets"],
                             "--table", fixtures["dsep_table"], "--states"))
    assert [3, "-->"] in out["states"]
    assert out["result"] == [0, 1, 2, 3, 4]


def test_reach_catalog_table_name(fixtures):
    out = run_cli("reach", "--graph", fixtures["dsep_demo_graph"],
                  "--sets", fixtures["dsep_demo_sets"], "--table", "dag_dsep")
    assert json.loads(out)["result"] == [0, 1, 2, 3, 4]


def test_reach_table_search_root(fixtures, tmp_path, monkeypatch):
    root = tmp_path / "tables"
    root.mkdir()
    (root / "local.txt").write_text(causal.table_text("dag_dsep"))
    env_proc = subprocess.run(
        [sys.executable, "-m", "cifly.cli", "reach",
         "--graph", fixtures["dsep_demo_graph"], "--sets", fixtures["dsep_demo_sets"],
         "--table", "local.txt"],
        capture_output=True, text=True,
        env={"CIFLY_TABLE_PATH": str(root), "PATH": "/usr/bin:/bin"})
    assert env_proc.returncode == 0
    assert json.loads(env_proc.stdout)["result"] == [0, 1, 2, 3, 4]


def test_missing_table_flag_is_usage_error(fixtures):
    run_cli("reach", "--graph", fixtures["dsep_demo_graph"],
            "--sets", fixtures["dsep_demo_sets"], expect_code=2)


def test_unreadable_graph_is_input_error(fixtures, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    proc = subprocess.run(
        [sys.executable, "-m", "cifly.cli", "reach", "--graph", str(bad),
         "--sets", fixtures["dsep_demo_sets"], "--table", fixtures["dsep_table"]],
        capture_output=True, text=True)
    assert proc.returncode == 1
    assert proc.stderr.startswith("error:")


def test_malformed_table_is_input_error(fixtures, tmp_path):
    bad = tmp_path / "bad_table.txt"
    bad.write_text("SETS X\n")
    proc = subprocess.run(
        [sys.executable, "-m", "cifly.cli", "reach",
         "--graph", fixtures["dsep_demo_graph"], "--sets", fixtures["dsep_demo_sets"],
         "--table", str(bad)],
        capture_output=True, text=True)
    assert proc.returncode == 1
    assert "EDGES" in proc.stderr


def test_algo_iv_optimal_golden(fixtures):
    out = run_cli("algo", "iv-optimal", "--graph", fixtures["iv_b_graph"],
                  "--x", "0", "--y", "2")
    assert json.loads(out) == {"W": [5, 6], "Z": [4], "optimal": True}


def test_algo_iv_find_empty(fixtures):
    out = run_cli("algo", "iv-find", "--graph", fixtures["unsound_graph"],
                  "--x", "0", "--y", "2")
    assert json.loads(out) == {"result": []}


def test_algo_parent_aid_identity(fixtures, tmp_path):
    graph = {"p": 3, "edges": {"-->": [[0, 2], [1, 2]], "---": []}}
    path = tmp_path / "cpdag.json"
    path.write_text(json.dumps(graph))
    out = run_cli("algo", "parent-aid", "--true", str(path), "--guess", str(path))
    assert json.loads(out) == {"result": 0}


def test_algo_dsep(fixtures, tmp_path):
    graph = {"p": 3, "edges": {"-->": [[0, 1], [1, 2]], "<->": []}}
    path = tmp_path / "chain.json"
    path.write_text(json.dumps(graph))
    out = run_cli("algo", "dsep", "--graph", str(path),
                  "--X", "0", "--Y", "2", "--Z", "1")
    assert json.loads(out) == {"result": True}


def test_algo_moralize_and_project(tmp_path):
    graph = {"p": 3, "edges": {"-->": [[0, 1], [2, 1]]}}
    path = tmp_path / "dagg.json"
    path.write_text(json.dumps(graph))
    moral = json.loads(run_cli("algo", "moralize", "--graph", str(path)))
    assert moral["edges"]["---"] == [[0, 1], [0, 2], [1, 2]]
    chain = {"p": 3, "edges": {"-->": [[0, 1], [1, 2]]}}
    path.write_text(json.dumps(chain))
    projected = json.loads(run_cli("algo", "project", "--graph", str(path),
                                   "--latent", "1"))
    assert projected["edges"]["-->"] == [[0, 2]]
    closure = json.loads(run_cli("algo", "tc", "--graph", str(path)))
    assert closure["edges"]["-->"] == [[0, 1], [0, 2], [1, 2]]


def test_bench_zero_reps_is_usage_error():
    run_cli("bench", "--algo", "adjust", "--p", "20", "--reps", "0",
            expect_code=2)


def test_bench_unknown_algo_is_input_error():
    proc = subprocess.run(
        [sys.executable, "-m", "cifly.cli", "bench", "--algo", "frontdoor",
         "--p", "20", "--reps", "1"],
        capture_output=True, text=True)
    assert proc.returncode == 1


def test_bench_runs():
    out = json.loads(run_cli("bench", "--algo", "adjust", "--p", "40",
                             "--deg", "3", "--reps", "2", "--seed", "1"))
    assert out["reps"] == 2
    assert out["mean_s"] >= 0
    assert out["median_s"] >= 0


def test_report_envelope(fixtures):
    out = json.loads(run_cli("reach", "--graph", fixtures["dsep_demo_graph"],
                             "--sets", fixtures["dsep_demo_sets"],
                             "--table", fixtures["dsep_table"], "--report"))
    assert out["result"]["result"] == [0, 1, 2, 3, 4]
    assert set(out["digests"]) == {"graph", "table"}
    assert out["time_us"] >= 0


def test_reach_optimal_iv_cli(fixtures, tmp_path):
    sets = tmp_path / "iv_sets.json"
    sets.write_text(json.dumps({"S": 2, "A": [4, 5, 6], "B": [1, 2, 3]}))
    out = run_cli("reach", "--graph", fixtures["iv_b_graph"],
                  "--sets", str(sets), "--table", "iv_optimal")
    assert json.loads(out)["result"] == [5, 6]
