"""Seeded Monte Carlo experiments over scaling frames.

Replica ``r`` of a run draws its environment from a seed derived from the
master seed, the sample role, the frame and ``r``; nothing else.  Replicas are
farmed out to a thread pool (the compiled kernels release the GIL) and
collected in replica order, so results do not depend on the worker count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import __version__
from ._rng import derive_seed
from .environment import DistributionSpec, build_walk_ensemble, sample_weights
from .melon import melon_topk
from .passage import lattice_lpp
from .scaling import ScalingFrame, coord_map, rescale_geodesic, rescale_melon, rescale_passage
from .stats import StatsReport, Summary, discrepancy_check, exponent_fit, ks_two_sample

DEFAULT_CELL_BUDGET = 10 ** 9

ROLE_STREAMS = {"primary": 1, "reference": 2}

_DIST_SCHEMA = {
    "type": "object",
    "required": ["family"],
    "properties": {
        "family": {"enum": ["rademacher", "uniform", "centered-exponential",
                            "centered-geometric", "gaussian", "symmetrized-pareto"]},
        "params": {"type": "object", "additionalProperties": {"type": "number"}},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["frames", "dist", "replicas", "master_seed", "observable"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "frames": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object", "required": ["n", "beta"], "additionalProperties": False,
                "properties": {
                    "n": {"type": "integer", "minimum": 2},
                    "beta": {"oneOf": [{"type": "number", "exclusiveMinimum": 1},
                                       {"type": "string", "pattern": r"^\s*\d+(\s*/\s*\d+|\.\d+)?\s*$"}]},
                },
            },
        },
        "dist": _DIST_SCHEMA,
        "reference_dist": {"oneOf": [_DIST_SCHEMA, {"type": "null"}]},
        "replicas": {"type": "integer", "minimum": 1},
        "master_seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "cell_budget": {"type": "integer", "minimum": 1},
        "observable": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"const": "onePoint"}, "x": {"type": "number"},
                                "t": {"type": "number"}, "y": {"type": "number"},
                                "s": {"type": "number"}}},
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"const": "melonLine"},
                                "line": {"type": "integer", "minimum": 1},
                                "y": {"type": "number"}}},
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"const": "geodesicDisplacement"},
                                "v": {"type": "number", "minimum": 0, "maximum": 1},
                                "rescale": {"type": "boolean"}}},
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"const": "discrepancy"}}},
            ],
        },
        "gates": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "ks_max": {"type": "number", "minimum": 0, "maximum": 1},
                "slope_range": {"type": "array", "items": {"type": "number"},
                                "minItems": 2, "maxItems": 2},
            },
        },
    },
}

_OBSERVABLE_DEFAULTS = {
    "onePoint": {"x": 0.0, "t": 0.0, "y": 0.0, "s": 1.0},
    "melonLine": {"line": 1, "y": 0.0},
    "geodesicDisplacement": {"v": 0.5, "rescale": True},
    "discrepancy": {},
}


class ConfigError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    frames: tuple
    dist: DistributionSpec
    replicas: int
    master_seed: int
    observable: dict
    reference_dist: DistributionSpec = DistributionSpec("gaussian")
    cell_budget: int = DEFAULT_CELL_BUDGET
    gates: dict = field(default_factory=dict)
    name: str = "experiment"

    def __post_init__(self):
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if not self.frames:
            raise ConfigError("at least one frame is required")
        obs = dict(self.observable)
        kind = obs.get("kind")
        if kind not in _OBSERVABLE_DEFAULTS:
            raise ConfigError(f"unknown observable {kind!r}")
        full = {"kind": kind, **_OBSERVABLE_DEFAULTS[kind]}
        full.update(obs)
        for key in ("x", "t", "y", "s", "v"):
            if key in full:
                full[key] = float(full[key])
        if kind == "onePoint" and not full["t"] < full["s"]:
            raise ConfigError("onePoint needs t < s")
        if kind == "melonLine" and any(full["line"] > f.n for f in self.frames):
            raise ConfigError("melon line index exceeds the frame's line count")
        object.__setattr__(self, "observable", full)

    @classmethod
    def from_dict(cls, d):
        try:
            jsonschema.validate(d, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(exc.message) from None
        try:
            frames = tuple(ScalingFrame(f["n"], f["beta"]) for f in d["frames"])
            ref = d.get("reference_dist", {"family": "gaussian"})
            return cls(
                frames=frames,
                dist=DistributionSpec.from_dict(d["dist"]),
                reference_dist=None if ref is None else DistributionSpec.from_dict(ref),
                replicas=d["replicas"],
                master_seed=d["master_seed"],
                observable=d["observable"],
                cell_budget=d.get("cell_budget", DEFAULT_CELL_BUDGET),
                gates=dict(d.get("gates", {})),
                name=d.get("name", "experiment"),
            )
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self):
        """Fully resolved configuration (defaults filled in)."""
        return {
            "name": self.name,
            "frames": [f.to_dict() for f in self.frames],
            "dist": self.dist.to_dict(),
            "reference_dist": None if self.reference_dist is None else self.reference_dist.to_dict(),
            "replicas": self.replicas,
            "master_seed": self.master_seed,
            "observable": self.observable,
            "cell_budget": self.cell_budget,
            "gates": self.gates,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def roles(self):
        out = [("primary", self.dist)]
        if self.reference_dist is not None:
            out.append(("reference", self.reference_dist))
        return out


def replica_seed(master_seed, role, frame, r):
    return derive_seed(master_seed, ROLE_STREAMS[role], frame.n,
                       frame.beta.numerator, frame.beta.denominator, r)


def _geometry(obs, frame):
    """(field width, field height) an observable needs in a frame."""
    kind = obs["kind"]
    if kind == "onePoint":
        a = coord_map(obs["x"], obs["t"], frame)
        b = coord_map(obs["y"], obs["s"], frame)
        return max(a.u, b.u) + 1, b.v + 1
    if kind == "melonLine":
        return max(coord_map(obs["y"], 1, frame).u, 1), frame.n
    return frame.width + 1, frame.n + 1


def cell_count(cfg: ExperimentConfig) -> int:
    total = 0
    for frame in cfg.frames:
        w, h = _geometry(cfg.observable, frame)
        total += w * h * cfg.replicas * len(cfg.roles)
    return total


def observe(obs, frame, dist, seed):
    """One replica of the observable; returns ``(value, bound_violations)``."""
    kind = obs["kind"]
    width, height = _geometry(obs, frame)
    w = sample_weights(dist, width, height, seed)
    if kind == "onePoint":
        point = (obs["x"], obs["t"], obs["y"], obs["s"])
        a = coord_map(obs["x"], obs["t"], frame)
        b = coord_map(obs["y"], obs["s"], frame)
        L = lattice_lpp(w, a, b).value
        return rescale_passage(L, point, frame, seed).value, 0
    if kind == "melonLine":
        u = coord_map(obs["y"], 1, frame).u
        m = melon_topk(build_walk_ensemble(w), obs["line"], [float(u)])
        return float(rescale_melon(m, frame, [obs["y"]])[obs["line"] - 1, 0]), 0
    if kind == "geodesicDisplacement":
        res = lattice_lpp(w, (0, 0), (frame.width, frame.n), want_geodesic=True)
        z = rescale_geodesic(res.geodesic, frame, obs["v"])
        if obs["rescale"]:
            return z, 0
        return res.geodesic.at(obs["v"] * frame.n) - obs["v"] * frame.power(frame.beta), 0
    rep = discrepancy_check(w, frame)
    return rep.max_discrepancy, rep.violations


def default_workers():
    env = os.environ.get("THINSCALE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    # (frame index, role) -> arrays
    values: dict
    seeds: dict
    violations: dict

    def samples(self, frame_index, role="primary"):
        return self.values[(frame_index, role)]

    def reports(self):
        out = []
        for fi, frame in enumerate(self.config.frames):
            summ = {role: Summary.of(self.values[(fi, role)]) for role, _ in self.config.roles}
            ks = p = None
            if self.config.reference_dist is not None:
                ks, p = ks_two_sample(self.values[(fi, "primary")], self.values[(fi, "reference")])
            viol = sum(int(self.violations[(fi, role)].sum()) for role, _ in self.config.roles)
            out.append(StatsReport(summ, ks, p, None, viol, {"frame": frame.to_dict()}))
        return out

    def exponent(self, role="primary"):
        """Fit of sample standard deviation against ``n`` across frames."""
        pts = [(f.n, float(np.std(self.values[(fi, role)], ddof=1)))
               for fi, f in enumerate(self.config.frames)]
        return exponent_fit(pts)

    def samples_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["n", "beta", "role", "family", "replica", "seed", "value"])
        for fi, frame in enumerate(self.config.frames):
            for role, dist in self.config.roles:
                vals, seeds = self.values[(fi, role)], self.seeds[(fi, role)]
                for r in range(len(vals)):
                    out.writerow([frame.n, str(frame.beta), role, dist.family, r,
                                  int(seeds[r]), repr(float(vals[r]))])
        return buf.getvalue()

    def report_dict(self):
        reports = self.reports()
        body = {
            "config": self.config.to_dict(),
            "config_digest": self.config.digest(),
            "frames": [r.to_dict() for r in reports],
            "bound_violations": sum(r.bound_violations for r in reports),
            "gates": self.evaluate_gates(reports),
        }
        if len({f.n for f in self.config.frames}) >= 3:
            body["exponent_fit"] = self.exponent().to_dict()
        return body

    def evaluate_gates(self, reports=None):
        reports = reports if reports is not None else self.reports()
        gates = self.config.gates
        out = {}
        if "ks_max" in gates and self.config.reference_dist is not None:
            worst = max(r.ks_statistic for r in reports)
            out["ks_max"] = {"limit": gates["ks_max"], "observed": worst,
                             "passed": worst <= gates["ks_max"]}
        if "slope_range" in gates:
            lo, hi = gates["slope_range"]
            slope = self.exponent().slope
            out["slope_range"] = {"limit": [lo, hi], "observed": slope,
                                  "passed": lo <= slope <= hi}
        return out


def run_experiment(cfg: ExperimentConfig, workers=None) -> ExperimentResult:
    if cell_count(cfg) > cfg.cell_budget:
        raise BudgetExceeded(f"experiment needs {cell_count(cfg)} DP cells, "
                             f"budget is {cfg.cell_budget}")
    workers = default_workers() if workers is None else max(1, int(workers))
    values, seeds, violations = {}, {}, {}
    for fi, frame in enumerate(cfg.frames):
        for role, dist in cfg.roles:
            sd = [replica_seed(cfg.master_seed, role, frame, r) for r in range(cfg.replicas)]

            def one(seed, frame=frame, dist=dist):
                return observe(cfg.observable, frame, dist, seed)

            if workers == 1:
                res = [one(s) for s in sd]
            else:
                with ThreadPoolExecutor(workers) as pool:
                    res = list(pool.map(one, sd))
            values[(fi, role)] = np.array([v for v, _ in res])
            violations[(fi, role)] = np.array([b for _, b in res], dtype=np.int64)
            seeds[(fi, role)] = np.array(sd, dtype=np.uint64)
    return ExperimentResult(cfg, values, seeds, violations)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_outputs(result: ExperimentResult, outdir, started=None, finished=None):
    """Write samples.csv, report.json and manifest.json; returns the report."""
    os.makedirs(outdir, exist_ok=True)
    report = result.report_dict()
    files = {"samples.csv": result.samples_csv(), "report.json": _dump(report)}
    for name, text in files.items():
        with open(os.path.join(outdir, name), "w", newline="") as fh:
            fh.write(text)
    manifest = {
        "config_digest": result.config.digest(),
        "tool_version": __version__,
        "started": started,
        "finished": finished,
        "outputs": sorted(files) + ["manifest.json"],
        "output_sha256": {n: hashlib.sha256(t.encode()).hexdigest() for n, t in files.items()},
        "config": result.config.to_dict(),
    }
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        fh.write(_dump(manifest))
    return report
