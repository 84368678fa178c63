"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances and the master seed (1) are fixed here and never tuned to the
outcome.  Run standalone with ``python tests/test_acceptance.py`` or under
pytest, where the lines are repeated in the terminal summary.
"""

import time

import numpy as np
import pytest

from thinscale import (DistributionSpec, ExperimentConfig, ScalingFrame, bridge_dominance_test,
                       build_walk_ensemble, ks_two_sample, run_experiment, sample_weights, verify)
from thinscale.cli import bundled_config

MASTER_SEED = 1
SEEDS = range(100)
EXACT_TOL = 1e-9  # used inside thinscale.verify

ONE_POINT_KS = 0.08
MELON_KS = 0.10
SLOPE_RANGE = (13 / 6 - 0.20, 13 / 6 + 0.20)
SYMMETRY_KS = 0.10
DKW_ALPHA = 1e-3

RESULTS = []


def report(number, title, passed, detail):
    line = f"CRITERION {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return passed


def _load(name):
    cfg = ExperimentConfig.load(bundled_config(name))
    assert cfg.master_seed == MASTER_SEED
    return cfg


def test_c01_oracle_equivalence():
    t = time.perf_counter()
    lat = verify.check_lattice(SEEDS)
    semi = verify.check_semidiscrete(SEEDS)
    mel = verify.check_melon(SEEDS, max_lines=3, max_k=2, max_points=6)
    dt = time.perf_counter() - t
    ok = lat == semi == mel == 0 and dt < 60
    assert report(1, "oracle equivalence", ok,
                  f"lattice/horizontal/geodesic mismatches={lat}, semidiscrete={semi}, "
                  f"melon={mel}, {dt:.1f}s (limit 60s)")


def test_c02_walk_identity():
    bad = verify.check_walk_identity(SEEDS, side=10)
    assert report(2, "walk-ensemble identity", bad == 0, f"{bad} mismatches over 100 10x10 instances")


def test_c03_discrepancy_bound():
    bad = verify.check_discrepancy(SEEDS, max_width=1024, max_height=16)
    assert report(3, "deterministic discrepancy bound", bad == 0,
                  f"{bad} violations over 100 rectangles up to 1024x16")


def test_c04_melon_invariants():
    bad = 0
    for seed in SEEDS:
        rng = np.random.default_rng(40_000 + seed)
        lines = int(rng.integers(1, 7))
        points = int(rng.integers(2, 41))
        fam = ("gaussian", "rademacher", "centered-exponential")[seed % 3]
        F = build_walk_ensemble(sample_weights(DistributionSpec(fam), points - 1, lines, 40_000 + seed))
        bad += verify.melon_invariant_failures(F)
    assert report(4, "melon invariants", bad == 0, f"{bad} failures over 100 ensembles")


def test_c05_one_point_universality():
    cfg = _load("universality-small")
    assert cfg.frames[0] == ScalingFrame(16, "5/2") and cfg.frames[0].width == 1024
    assert cfg.replicas == 2000 and cfg.dist.family == "rademacher"
    t = time.perf_counter()
    res = run_experiment(cfg)
    dt = time.perf_counter() - t
    ks = res.reports()[0].ks_statistic
    ok = ks <= ONE_POINT_KS and dt <= 120
    assert report(5, "one-point universality", ok,
                  f"KS={ks:.4f} (limit {ONE_POINT_KS}), {dt:.1f}s (limit 120s)")


def test_c05b_null_calibration():
    """Gaussian against gaussian at the same size passes the threshold for >= 95% of seeds."""
    base = {"frames": [{"n": 16, "beta": "5/2"}], "dist": {"family": "gaussian"},
            "reference_dist": {"family": "gaussian"}, "replicas": 2000,
            "observable": {"kind": "onePoint"}}
    stats = []
    for seed in range(100):
        res = run_experiment(ExperimentConfig.from_dict({**base, "master_seed": seed}))
        stats.append(res.reports()[0].ks_statistic)
    frac = float(np.mean(np.array(stats) <= ONE_POINT_KS))
    assert report("5b", "null calibration of the KS threshold", frac >= 0.95,
                  f"pass fraction {frac:.2f} over 100 null seeds, max KS {max(stats):.4f}")


def test_c06_melon_universality():
    cfg = _load("melon-universality")
    assert cfg.replicas == 1000 and cfg.observable == {"kind": "melonLine", "line": 2, "y": 0.0}
    t = time.perf_counter()
    res = run_experiment(cfg)
    dt = time.perf_counter() - t
    ks = res.reports()[0].ks_statistic
    ok = ks <= MELON_KS and dt <= 600
    assert report(6, "second melon line universality", ok,
                  f"KS={ks:.4f} (limit {MELON_KS}), {dt:.1f}s (limit 600s)")


def test_c07_transversal_exponent():
    cfg = _load("transversal-exponent")
    assert [f.n for f in cfg.frames] == [16, 24, 32, 48, 64] and cfg.replicas == 500
    t = time.perf_counter()
    res = run_experiment(cfg)
    dt = time.perf_counter() - t
    fit = res.exponent()
    lo, hi = SLOPE_RANGE
    ok = lo <= fit.slope <= hi and dt <= 900
    assert report(7, "transversal fluctuation exponent", ok,
                  f"slope={fit.slope:.4f} +- {fit.stderr:.4f} (range [{lo:.3f}, {hi:.3f}]), "
                  f"{dt:.1f}s (limit 900s)")


def test_c08_geodesic_symmetry():
    cfg = ExperimentConfig.from_dict({
        "frames": [{"n": 32, "beta": "5/2"}], "dist": {"family": "gaussian"}, "reference_dist": None,
        "replicas": 500, "master_seed": MASTER_SEED,
        "observable": {"kind": "geodesicDisplacement", "v": 0.5, "rescale": True}})
    z = run_experiment(cfg).samples(0)
    ks, _ = ks_two_sample(z, -z)
    assert report(8, "rescaled geodesic symmetry", ks <= SYMMETRY_KS,
                  f"KS to mirror={ks:.4f} (limit {SYMMETRY_KS}), mean={z.mean():.4f}")


def test_c09_bridge_dominance():
    rep = bridge_dominance_test(10_000, MASTER_SEED, grid_step=1e-3, alpha=DKW_ALPHA)
    ex = rep.extra
    assert report(9, "bridge maximum dominated by max of two |normals|", rep.bound_violations == 0,
                  f"{rep.bound_violations} points beyond the DKW band {ex['band']:.4f}; "
                  f"largest CDF deficit {ex['max_cdf_deficit']:.4f} at x={ex['deficit_at']:.3f}")


def test_c10_determinism():
    small = {"dist": {"family": "rademacher"}, "replicas": 40, "master_seed": MASTER_SEED}
    configs = [_load("universality-small"), _load("melon-universality")] + [
        ExperimentConfig.from_dict({**small, "frames": [{"n": 8, "beta": "5/2"}, {"n": 12, "beta": 2}],
                                    "observable": obs})
        for obs in ({"kind": "geodesicDisplacement"}, {"kind": "discrepancy"},
                    {"kind": "onePoint", "x": 0.2, "t": 0.25, "y": -0.1, "s": 0.75})]
    differing = []
    for cfg in configs:
        outs = {run_experiment(cfg, workers=w).samples_csv() for w in (1, 3, 8)}
        outs.add(run_experiment(cfg, workers=8).samples_csv())
        if len(outs) != 1:
            differing.append(cfg.name)
    assert report(10, "determinism across worker counts", not differing,
                  f"{len(configs)} configs x workers 1/3/8 (+ rerun); differing: {differing or 'none'}")


if __name__ == "__main__":
    import sys
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
