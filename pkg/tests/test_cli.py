"""CLI harness tests: exit codes, reproducibility, config precedence."""

import json
from pathlib import Path

import pytest

from spinsphere.cli import main, parse_config_file, resolve_config, build_parser
from spinsphere.reports import write_csv


def run_cli(args):
    return main(args)


def read_bytes_map(directory: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


def test_every_experiment_passes(tmp_path):
    fast = {
        "evolve": [],
        "bloch": [],
        "curvature": [],
        "uncertainty": ["--states", "2000"],
        "born": ["--trials", "3000"],
        "markov": ["--trials", "3000"],
        "lens": [],
        "epr": ["--trials", "3000"],
        "e2-split": ["--trials", "3000"],
    }
    for name, extra in fast.items():
        out = tmp_path / name
        code = run_cli([name, "--out", str(out), *extra])
        assert code == 0, name
        report_name = f"{name.replace('-', '_')}_report.json"
        report = json.loads((out / report_name).read_text())
        assert report["pass"] is True
        assert report["experiment"] == name
        assert report["config"]["seed"] == 42  # echo of resolved config


def test_unknown_experiment_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run_cli(["warp-drive", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_malformed_config_exits_2(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("this is not a key value line\n")
    code = run_cli(["born", "--config", str(bad), "--out", str(tmp_path)])
    assert code == 2
    missing = run_cli(["born", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)])
    assert missing == 2
    unknown_key = tmp_path / "unk.cfg"
    unknown_key.write_text("flux_capacitor=88\n")
    assert run_cli(["born", "--config", str(unknown_key), "--out", str(tmp_path)]) == 2


def test_invalid_value_exits_2(tmp_path):
    assert run_cli(["born", "--c1sq", "1.5", "--out", str(tmp_path)]) == 2


def test_threshold_failure_exits_1(tmp_path):
    # Wrong evolution time: terminal state misses the equal superposition.
    code = run_cli(
        ["e2-split", "--t-final", "0.3", "--trials", "2000", "--out", str(tmp_path)]
    )
    assert code == 1
    report = json.loads((tmp_path / "e2_split_report.json").read_text())
    assert report["pass"] is False
    assert report["checks"]["terminal_state"] is False


def test_reruns_are_byte_identical(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    args = ["born", "--c1sq", "0.75", "--trials", "4000", "--seed", "7",
            "--outcomes-csv"]
    assert run_cli([*args, "--out", str(out_a)]) == 0
    assert run_cli([*args, "--out", str(out_b)]) == 0
    assert read_bytes_map(out_a) == read_bytes_map(out_b)
    m_a, m_b = tmp_path / "ma", tmp_path / "mb"
    for out in (m_a, m_b):
        assert run_cli(["markov", "--trials", "2000", "--out", str(out)]) == 0
    assert read_bytes_map(m_a) == read_bytes_map(m_b)


def test_seed_changes_output(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run_cli(["born", "--trials", "4000", "--seed", "1", "--out", str(out_a)])
    run_cli(["born", "--trials", "4000", "--seed", "2", "--out", str(out_b)])
    a = json.loads((out_a / "born_report.json").read_text())
    b = json.loads((out_b / "born_report.json").read_text())
    assert a["metrics"]["per_eigenstate_counts"] != b["metrics"]["per_eigenstate_counts"]


def test_config_file_and_override_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nc1sq = 0.25\ntrials = 3000\nseed = 9\n")
    values = parse_config_file(str(cfg))
    assert values == {"c1sq": 0.25, "trials": 3000, "seed": 9}
    parser = build_parser()
    args = parser.parse_args(
        ["born", "--config", str(cfg), "--c1sq", "0.75", "--out", str(tmp_path)]
    )
    resolved = resolve_config(args)
    assert resolved["c1sq"] == 0.75  # flag wins
    assert resolved["trials"] == 3000  # file wins over default
    assert resolved["seed"] == 9


def test_report_embeds_rerunnable_config(tmp_path):
    assert run_cli(["born", "--trials", "2500", "--seed", "3", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "born_report.json").read_text())
    cfg = report["config"]
    rerun = tmp_path / "rerun"
    code = run_cli(
        [
            "born",
            "--trials", str(cfg["trials"]),
            "--seed", str(cfg["seed"]),
            "--c1sq", str(cfg["c1sq"]),
            "--out", str(rerun),
        ]
    )
    assert code == 0
    again = json.loads((rerun / "born_report.json").read_text())
    assert again["metrics"] == report["metrics"]


def test_empty_csv_has_header_only(tmp_path):
    target = tmp_path / "empty.csv"
    write_csv(target, ["t", "x"], [])
    assert target.read_bytes() == b"t,x\r\n"


def test_json_keys_sorted(tmp_path):
    assert run_cli(["curvature", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "curvature_report.json").read_text()
    parsed = json.loads(text)
    assert list(parsed) == sorted(parsed)
