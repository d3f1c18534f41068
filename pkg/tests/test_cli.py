import json
import subprocess
import sys

import pytest

from mobskew import cli


def run(args, **kw):
    return cli.main(args)


def test_davenport_smoke(tmp_path):
    out = tmp_path / "dav"
    assert run(["run", "davenport", "--beta", "golden", "--limit", "1e5", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["experiment"] == "davenport"
    assert set(summary) == {"experiment", "params", "values", "residuals", "failures"}
    assert "100000" in summary["values"]["averages"]
    assert (out / "curves.csv").read_text().startswith("N,re,im,abs\n")


def test_main_sum_with_zero_h_is_mertens(tmp_path):
    out = tmp_path / "ms"
    assert run(["run", "main-sum", "--h", "zero", "--alpha", "golden", "--checkpoints", "10,100,1000", "--limit", "1000", "--out", str(out)]) == 0
    rows = (out / "curves.csv").read_text().splitlines()[1:]
    assert [r.split(",")[1] for r in rows] == ["-0.1", "0.01", "0.002"]


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# sieve run\nlimit = 1000\ncheckpoints = 10,1000\n")
    out = tmp_path / "s"
    assert run(["run", "sieve", "--config", str(cfg), "--checkpoints", "10,100", "--out", str(out)]) == 0
    assert (out / "curves.csv").read_text().splitlines() == ["N,mertens,mertens_over_N", "10,-1,-0.1", "100,1,0.01"]


@pytest.mark.parametrize(
    "args",
    [
        ["run", "nope"],
        ["run", "sieve", "--bogus", "1"],
        ["run", "sieve", "--limit", "abc"],
        ["run", "sieve", "--limit"],
        ["run", "davenport", "--beta", "surd:1,2"],
    ],
)
def test_usage_errors_write_nothing(tmp_path, args):
    out = tmp_path / "bad"
    assert run(args + ["--out", str(out)] if len(args) > 1 and args[1] != "nope" else args) == 1
    assert not out.exists()


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path))
    assert run(["run", "cfrac", "--alpha", "golden", "--K", "10"]) == 0
    assert (tmp_path / "cfrac" / "manifest.json").exists()


def test_manifest_reproduces_artifacts(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["run", "bsz", "--alpha", "golden", "--h", "random", "--limit", "2000", "--out", str(a)]) == 0
    assert run(["run", "--manifest", str(a / "manifest.json"), "--out", str(b)]) == 0
    for name in ("summary.json", "curves.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ma, mb = (json.loads((d / "manifest.json").read_text()) for d in (a, b))
    ma.pop("wall_seconds"), mb.pop("wall_seconds")
    assert ma == mb


def test_curves_identical_across_threads(tmp_path):
    outs = []
    for t in (1, 4, 8):
        out = tmp_path / f"t{t}"
        assert run(["run", "main-sum", "--limit", "3e5", "--threads", str(t), "--out", str(out)]) == 0
        outs.append((out / "curves.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]


@pytest.mark.parametrize("exp", cli.EXPERIMENTS)
def test_every_experiment_runs(tmp_path, exp):
    small = {
        "sieve": ["--limit", "1e4"], "davenport": ["--limit", "1e4"], "main-sum": ["--limit", "1e4"],
        "bsz": ["--limit", "500"], "short-interval": ["--X", "1e4", "--l", "10,100"], "mu-chi": ["--limit", "1e4"],
        "furstenberg-demo": ["--limit", "1e4"], "dirichlet-decompose": ["--cases", "3"],
    }.get(exp, [])
    assert run(["run", exp, *small, "--out", str(tmp_path / exp)]) == 0
    assert sorted(p.name for p in (tmp_path / exp).iterdir()) == ["curves.csv", "manifest.json", "summary.json"]


def test_invariant_failure_exits_2(tmp_path):
    # a floor above every small divisor forces NearResonance inside the solver
    assert run(["run", "coboundary", "--alpha", "golden", "--h", "random", "--floor", "0.5", "--out", str(tmp_path / "x")]) == 2


def test_verify_scaled_and_negative_control():
    ok = subprocess.run([sys.executable, "-m", "mobskew", "verify", "--limit", "10"], capture_output=True, text=True)
    assert ok.returncode == 0, ok.stdout + ok.stderr
    assert "[SKIP] C8" in ok.stdout and "[PASS] C1" in ok.stdout
    bad = subprocess.run(
        [sys.executable, "-m", "mobskew", "verify", "--limit", "10", "--no-determinism", "--corrupt-character"],
        capture_output=True, text=True,
    )
    assert bad.returncode == 2
    assert "FAILED C2" in bad.stderr
