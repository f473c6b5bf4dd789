import json

import pytest

from dmexp.cli import _fmt, main

FAST_ARGS = {
    "lmr-converge": ["--ns", "128,256,512", "--seed", "3"],
    "discriminate": ["--trials", "3", "--seed", "3"],
    "phase-est": ["--seed", "3"],
    "ortho-test": ["--seed", "3"],
    "add-states": [],
    "grover": ["--runs", "2", "--seed", "3"],
    "poly-sim": ["--cases", "1", "--seed", "3"],
    "jordan-lie": ["--cases", "2", "--seed", "3"],
    "universal-demo": ["--circuit", "x", "--delta", "0.2"],
    "tomo-compare": [],
}

HEADERS = {
    "lmr-converge": "n,trace_distance",
    "discriminate": "trial,hidden,guess,correct",
    "phase-est": "index,estimate",
    "ortho-test": "pair,verdict",
    "add-states": "chi,fidelity",
    "grover": "run,verdict",
    "poly-sim": "case,trace_distance",
    "jordan-lie": "case,k,deviation",
    "universal-demo": "key,value",
    "tomo-compare": "delta,lmr_budget,tomography_bound,ratio",
}


def run_cli(args, tmp_path, name="report.csv"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out


def test_missing_seed_is_usage_error(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("DMEXP_SEED", raising=False)
    code, _ = run_cli(["grover", "--runs", "1"], tmp_path)
    assert code == 2
    blob = json.loads(capsys.readouterr().out)
    assert blob["exit"] == 2 and "seed" in blob["error"]


def test_env_seed_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("DMEXP_SEED", "9")
    code, out = run_cli(["lmr-converge", "--ns", "128,256,512"], tmp_path)
    assert code == 0 and out.exists()
    monkeypatch.setenv("DMEXP_SEED", "not-a-number")
    assert run_cli(["lmr-converge", "--ns", "128,256,512"], tmp_path)[0] == 2


def test_deterministic_commands_need_no_seed(tmp_path, monkeypatch):
    monkeypatch.delenv("DMEXP_SEED", raising=False)
    assert run_cli(["add-states"], tmp_path)[0] == 0
    assert run_cli(["tomo-compare"], tmp_path)[0] == 0


def test_bad_values_exit_2(tmp_path):
    assert run_cli(["lmr-converge", "--ns", "8", "--seed", "1"], tmp_path)[0] == 2
    assert run_cli(["grover", "--lam", "1.5", "--seed", "1", "--runs", "1"], tmp_path)[0] == 2
    assert run_cli(["phase-est", "--diag", "bogus", "--seed", "1"], tmp_path)[0] == 2
    assert main(["lmr-converge", "--no-such-flag"]) == 2
    assert main(["no-such-subcommand"]) == 2


def test_expect_mismatch_exits_3(tmp_path, capsys):
    # lam=0 leaves the start state orthogonal to the target, so "found" never happens
    code, _ = run_cli(
        ["grover", "--lam", "0.0", "--expect", "found", "--runs", "3", "--seed", "5"],
        tmp_path)
    assert code == 3
    blob = json.loads(capsys.readouterr().out)
    assert blob["exit"] == 3 and blob["summary"]["found_rate"] == 0.0


def test_stdout_summary_line(tmp_path, capsys):
    code, out = run_cli(["tomo-compare"], tmp_path)
    assert code == 0
    blob = json.loads(capsys.readouterr().out)
    assert set(blob) == {"subcommand", "summary", "report", "exit"}
    assert blob["report"] == str(out)


def test_csv_reports_are_byte_identical(tmp_path):
    _, a = run_cli(["discriminate", "--trials", "10", "--seed", "11"], tmp_path, "a.csv")
    _, b = run_cli(["discriminate", "--trials", "10", "--seed", "11"], tmp_path, "b.csv")
    _, c = run_cli(["discriminate", "--trials", "10", "--seed", "12"], tmp_path, "c.csv")
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_json_report_shape(tmp_path):
    args = ["lmr-converge", "--ns", "128,256,512", "--seed", "2", "--format", "json"]
    _, a = run_cli(args, tmp_path, "a.json")
    _, b = run_cli(args, tmp_path, "b.json")
    blob_a, blob_b = json.loads(a.read_text()), json.loads(b.read_text())
    assert set(blob_a) == {"version", "subcommand", "seed", "params", "columns",
                           "rows", "summary", "wall_time_s"}
    assert blob_a["seed"] == 2
    assert blob_a["columns"] == ["n", "trace_distance"]
    assert len(blob_a["rows"]) == 3
    assert blob_a["params"]["ns"] == "128,256,512"
    # wall time is the only field allowed to vary across reruns
    blob_a.pop("wall_time_s"), blob_b.pop("wall_time_s")
    assert blob_a == blob_b


@pytest.mark.parametrize("sub", sorted(FAST_ARGS))
def test_csv_header_schema(sub, tmp_path):
    code, out = run_cli([sub] + FAST_ARGS[sub], tmp_path)
    assert code == 0
    assert out.read_text().splitlines()[0] == HEADERS[sub]


@pytest.mark.parametrize("sub", sorted(FAST_ARGS))
def test_selftest(sub, capsys):
    assert main([sub, "--selftest"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(line.endswith("pass") for line in lines)


def test_float_formatting():
    assert _fmt(1.0 / 3.0) == "0.333333333333"
    assert _fmt(0.1) == "0.1"
    assert _fmt(True) == "true"
    assert _fmt(7) == "7"
    assert _fmt("verdict") == "verdict"


def test_min_fidelity_gate(tmp_path):
    assert run_cli(["add-states", "--min-fidelity", "0.999"], tmp_path)[0] == 0
    assert run_cli(["add-states", "--min-fidelity", "2.0"], tmp_path)[0] == 3
