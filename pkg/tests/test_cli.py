import io
import json

import pytest

from thinscale import cli, passage


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, out=out)
    return code, out.getvalue()


def test_passage_single_step():
    from thinscale import DistributionSpec, sample_weights
    code, text = run(["passage", "--width", "3", "--height", "3", "--from", "1,1", "--to", "2,1",
                      "--seed", "4"])
    assert code == 0
    w = sample_weights(DistributionSpec("gaussian"), 3, 3, 4)
    assert json.loads(text)["value"] == w.weight(1, 1)


def test_passage_geodesic_csv(tmp_path):
    path = tmp_path / "g.csv"
    code, _ = run(["passage", "--width", "5", "--height", "5", "--from", "0,0", "--to", "4,4",
                   "--geodesic", str(path), "--dist", "rademacher"])
    assert code == 0
    rows = path.read_text().strip().split("\n")
    assert rows[0] == "level,entry"
    entries = [float(r.split(",")[1]) for r in rows[1:]]
    assert len(entries) == 5 and entries == sorted(entries)


def test_passage_is_deterministic():
    argv = ["passage", "--width", "50", "--height", "6", "--from", "0,0", "--to", "49,5",
            "--dist", "centered-geometric", "--param", "q=0.3", "--seed", "12"]
    assert run(argv) == run(argv)


@pytest.mark.parametrize("argv", [
    ["passage", "--width", "3", "--height", "3", "--from", "0,0", "--to", "5,1"],
    ["passage", "--width", "3", "--height", "3", "--from", "0,0", "--to", "x"],
    ["passage", "--width", "3", "--height", "3", "--from", "0,0", "--to", "1,1", "--dist", "nope"],
    ["passage", "--width", "3", "--height", "3", "--from", "0,0", "--to", "1,1", "--param", "q"],
    ["melon", "--width", "4", "--lines", "2", "--k", "3"],
    ["geodesic", "--n", "4", "--beta", "1"],
    ["bogus"],
    [],
])
def test_usage_errors_exit_2(argv):
    assert run(argv)[0] == 2


def test_cell_budget_exit_1():
    code, _ = run(["geodesic", "--n", "16", "--beta", "5/2", "--cell-budget", "100"])
    assert code == 1


def test_melon_csv(tmp_path):
    code, text = run(["melon", "--width", "6", "--lines", "3", "--k", "2", "--every", "2"])
    assert code == 0
    rows = text.strip().split("\n")
    assert rows[0] == "y,line1,line2" and [r.split(",")[0] for r in rows[1:]] == ["0.0", "2.0", "4.0", "6.0"]


def test_geodesic_csv(tmp_path):
    path = tmp_path / "g.csv"
    code, _ = run(["geodesic", "--n", "4", "--beta", "2", "--out", str(path)])
    assert code == 0
    rows = path.read_text().strip().split("\n")
    assert rows[0] == "level,entry,rescaled" and len(rows) == 6
    assert rows[1] == "0,0.0,0.0"


def _write(tmp_path, cfg):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return str(p)


SMOKE = {"frames": [{"n": 4, "beta": "3/2"}], "dist": {"family": "gaussian"}, "reference_dist": None,
         "replicas": 1, "master_seed": 7, "observable": {"kind": "onePoint"}}


def test_experiment_smoke(tmp_path):
    code, _ = run(["experiment", _write(tmp_path, SMOKE), "--out", str(tmp_path / "o")])
    assert code == 0
    rows = (tmp_path / "o" / "samples.csv").read_text().strip().split("\n")
    assert len(rows) == 2
    assert {p.name for p in (tmp_path / "o").iterdir()} == {"samples.csv", "report.json", "manifest.json"}


def test_bundled_smoke(tmp_path):
    assert run(["experiment", "smoke", "--out", str(tmp_path)])[0] == 0


@pytest.mark.parametrize("change", [{"frames": [{"n": 4, "beta": 1}]}, {"frames": [{"n": 4, "beta": 0.5}]},
                                    {"replicas": 0}, {"observable": {"kind": "x"}}])
def test_experiment_schema_exit_2(tmp_path, change):
    code, _ = run(["experiment", _write(tmp_path, {**SMOKE, **change}), "--out", str(tmp_path / "o")])
    assert code == 2


def test_experiment_missing_or_malformed_config(tmp_path):
    assert run(["experiment", str(tmp_path / "none.json"), "--out", str(tmp_path)])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["experiment", str(bad), "--out", str(tmp_path)])[0] == 2


def test_experiment_budget_exit_1(tmp_path):
    code, _ = run(["experiment", _write(tmp_path, SMOKE), "--out", str(tmp_path), "--cell-budget", "2"])
    assert code == 1


def test_experiment_gate_exit_3(tmp_path):
    cfg = {**SMOKE, "reference_dist": {"family": "rademacher"}, "replicas": 50,
           "gates": {"ks_max": 0.0}}
    assert run(["experiment", _write(tmp_path, cfg), "--out", str(tmp_path / "o")])[0] == 3


def test_experiment_bound_exit_4(tmp_path, monkeypatch):
    from thinscale import stats
    real = stats.horizontal_lpp

    def inflated(w, a, b, want_geodesic=False):
        r = real(w, a, b, want_geodesic)
        return passage.PassageResult(r.value + 1e6, r.geodesic)

    monkeypatch.setattr(stats, "horizontal_lpp", inflated)
    cfg = {**SMOKE, "observable": {"kind": "discrepancy"}, "replicas": 2}
    assert run(["experiment", _write(tmp_path, cfg), "--out", str(tmp_path / "o")])[0] == 4


def test_experiment_outputs_independent_of_threads(tmp_path, monkeypatch):
    cfg = _write(tmp_path, {**SMOKE, "replicas": 30, "reference_dist": {"family": "uniform"}})
    monkeypatch.setenv("THINSCALE_THREADS", "1")
    run(["experiment", cfg, "--out", str(tmp_path / "a")])
    monkeypatch.setenv("THINSCALE_THREADS", "8")
    run(["experiment", cfg, "--out", str(tmp_path / "b")])
    for name in ("samples.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_verify_clean_and_digest_stable():
    code1, log1 = run(["verify", "--seeds", "3"])
    code2, log2 = run(["verify", "--seeds", "3"])
    assert code1 == code2 == 0
    assert log1 == log2 and "log digest" in log1


def test_verify_catches_off_by_one(monkeypatch):
    real = passage.horizontal_lpp

    def off_by_one(w, a, b, want_geodesic=False):
        # drops the last horizontal-step column
        b = (max(a[0], b[0] - 1), b[1])
        return real(w, a, b, want_geodesic)

    monkeypatch.setattr(passage, "horizontal_lpp", off_by_one)
    code, log = run(["verify", "--seeds", "3"])
    assert code == 4 and "mismatches" in log
