"""Command-line surface: exit codes, file outputs, manifests, determinism."""
import hashlib
import json
import os

import pytest
from click.testing import CliRunner

from wdsembed.cli import main
from wdsembed.measures import Measure, MeasureFamily
from wdsembed.transforms import discrete_power_measure, translated_two_atom_measure

TWO_ATOM = Measure.from_atoms([(-2.0, 0.5), (1.0, 0.5)])


@pytest.fixture()
def runner():
    return CliRunner()


def _write(path, text):
    path.write_text(text)
    return str(path)


def _wds_family_json():
    fam = MeasureFamily.make(
        [(t, discrete_power_measure(1, t)) for t in (0.3, 0.6)]
    )
    return fam.to_json()


def _bad_family_json():
    fam = MeasureFamily.make(
        [(t, translated_two_atom_measure(t)) for t in (0.5, 1.0)]
    )
    return fam.to_json()


# -- order check ------------------------------------------------------


def test_order_check_holds_exit_zero(runner, tmp_path):
    fam = _write(tmp_path / "fam.json", _wds_family_json())
    out = tmp_path / "verdict.json"
    res = runner.invoke(main, [
        "order", "check", "-r", "wds", "-f", fam,
        "--out", str(out), "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 0, res.output
    doc = json.loads(out.read_text())
    assert doc["holds"] is True
    man = json.loads((tmp_path / "man.json").read_text())
    assert fam in man["input_hashes"]
    assert man["version"]
    assert man["wall_time"] > 0


def test_order_check_fails_exit_one_with_witness(runner, tmp_path):
    fam = _write(tmp_path / "fam.json", _bad_family_json())
    res = runner.invoke(main, [
        "order", "check", "-r", "wds", "-f", fam,
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 1
    doc = json.loads(res.output)
    assert doc["holds"] is False
    assert doc["witness"] is not None


def test_order_check_hyphenated_relation(runner, tmp_path):
    fam = _write(tmp_path / "fam.json", MeasureFamily.make(
        [(1.0, Measure.point_mass(-1.0)), (2.0, Measure.point_mass(-2.0))]
    ).to_json())
    res = runner.invoke(main, [
        "order", "check", "-r", "st-decreasing", "-f", fam,
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 0, res.output


def test_order_check_malformed_json_exit_two(runner, tmp_path):
    fam = _write(tmp_path / "fam.json", "{not json")
    res = runner.invoke(main, [
        "order", "check", "-r", "wds", "-f", fam,
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 2


def test_order_check_invalid_measure_exit_two(runner, tmp_path):
    bad = {"family": [
        {"t": 0.5, "measure": {"atoms": [{"x": "-2", "w": "0.25"}], "segments": []}},
        {"t": 1.0, "measure": {"atoms": [{"x": "-2", "w": "1.0"}], "segments": []}},
    ]}
    fam = _write(tmp_path / "fam.json", json.dumps(bad))
    res = runner.invoke(main, [
        "order", "check", "-r", "wds", "-f", fam,
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 2


# -- psi eval ---------------------------------------------------------


def test_psi_eval_csv(runner, tmp_path):
    mp = _write(tmp_path / "m.json", TWO_ATOM.to_json())
    out = tmp_path / "psi.csv"
    res = runner.invoke(main, [
        "psi", "eval", "-m", mp, "-g", "-3:2:11", "-o", str(out),
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 0, res.output
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x,value,is_infinite"
    assert len(lines) == 12
    last = lines[-1].split(",")
    assert last[2] == "1" and last[1] == ""  # x = 2 is beyond the support


def test_psi_eval_bad_grid_exit_two(runner, tmp_path):
    mp = _write(tmp_path / "m.json", TWO_ATOM.to_json())
    res = runner.invoke(main, [
        "psi", "eval", "-m", mp, "-g", "3:-3:11", "-o", str(tmp_path / "x.csv"),
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 2


# -- barrier export ---------------------------------------------------


def test_barrier_export_point_mass(runner, tmp_path):
    mp = _write(tmp_path / "m.json", Measure.point_mass(-1.0).to_json())
    out = tmp_path / "barrier.csv"
    res = runner.invoke(main, [
        "barrier", "export", "-m", mp, "-o", str(out),
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 0, res.output
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "alpha,b,interp"
    assert len(lines) == 2


def test_barrier_export_nonnegative_mean_exit_two(runner, tmp_path):
    mp = _write(tmp_path / "m.json", Measure.point_mass(1.0).to_json())
    res = runner.invoke(main, [
        "barrier", "export", "-m", mp, "-o", str(tmp_path / "b.csv"),
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 2


# -- transform apply --------------------------------------------------


def test_transform_censor_measure(runner, tmp_path):
    mp = _write(tmp_path / "m.json", TWO_ATOM.to_json())
    out = tmp_path / "out.json"
    res = runner.invoke(main, [
        "transform", "apply", "-n", "censor", "-p", '{"a": -3, "b": 0}',
        "-i", mp, "-o", str(out), "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 0, res.output
    doc = json.loads(out.read_text())
    assert doc["provenance"]["transform"] == "censor"
    m = Measure.from_dict(doc["result"])
    assert m.mean() == pytest.approx(-0.5, abs=1e-12)
    assert {x for x, _ in m.atoms} == {-3.0, 0.0, 1.0}


def test_transform_convex_family(runner, tmp_path):
    fam = _write(tmp_path / "fam.json", MeasureFamily.make(
        [(t, discrete_power_measure(1, t)) for t in (0.2, 0.5, 0.8)]
    ).to_json())
    out = tmp_path / "out.json"
    res = runner.invoke(main, [
        "transform", "apply", "-n", "convex", "-p", '{"tau": [0.2, 0.8]}',
        "-i", fam, "-o", str(out), "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 0, res.output
    doc = json.loads(out.read_text())
    back = MeasureFamily.from_dict(doc["result"])
    assert len(back) > 3


def test_transform_bad_params_exit_two(runner, tmp_path):
    mp = _write(tmp_path / "m.json", TWO_ATOM.to_json())
    res = runner.invoke(main, [
        "transform", "apply", "-n", "censor", "-p", '{"a": 1, "b": 0}',
        "-i", mp, "-o", str(tmp_path / "o.json"),
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 2


# -- embed simulate ---------------------------------------------------


def _hash_dir(d):
    out = {}
    for name in sorted(os.listdir(d)):
        if name.endswith("manifest.json"):
            continue  # wall time differs between runs
        out[name] = hashlib.sha256((d / name).read_bytes()).hexdigest()
    return out


def test_embed_simulate_deterministic(runner, tmp_path):
    fam = _write(tmp_path / "fam.json", _wds_family_json())
    dirs = []
    for tag in ("a", "b"):
        out_dir = tmp_path / f"run_{tag}"
        res = runner.invoke(main, [
            "embed", "simulate", "-f", fam, "--dt", "1e-3", "--paths", "100",
            "--seed", "42", "--horizon", "10000", "-o", str(out_dir),
        ])
        assert res.exit_code == 0, res.output
        dirs.append(out_dir)
    assert _hash_dir(dirs[0]) == _hash_dir(dirs[1])
    summary = json.loads((dirs[0] / "summary.json").read_text())
    assert summary["monotone_violations"] == 0
    assert set(summary["times"]) == {"0.3", "0.6"}
    first = (dirs[0] / "time_0.csv").read_text().splitlines()
    assert first[0] == "path_id,T,BT,ST,censored"
    assert len(first) == 101


def test_embed_simulate_rejects_non_wds(runner, tmp_path):
    fam = _write(tmp_path / "fam.json", _bad_family_json())
    res = runner.invoke(main, [
        "embed", "simulate", "-f", fam, "--paths", "50", "--horizon", "100",
        "-o", str(tmp_path / "out"),
    ])
    assert res.exit_code == 1


# -- examples ---------------------------------------------------------


def test_examples_run_named(runner, tmp_path):
    res = runner.invoke(main, [
        "examples", "run", "-n", "two_atom",
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 0, res.output
    assert "[PASS] two_atom" in res.output


def test_examples_run_counterexample_detected(runner, tmp_path):
    res = runner.invoke(main, [
        "examples", "run", "-n", "translated_counterexample",
        "--manifest", str(tmp_path / "man.json"),
    ])
    assert res.exit_code == 0, res.output  # detecting the failure is a pass


def test_examples_run_requires_selection(runner, tmp_path):
    res = runner.invoke(main, ["examples", "run"])
    assert res.exit_code == 2


def test_version(runner):
    res = runner.invoke(main, ["--version"])
    assert res.exit_code == 0
