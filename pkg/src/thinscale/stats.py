"""Statistical comparisons and deterministic bound checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special, stats as sps

from ._rng import derive_seed
from .environment import DistributionSpec, WeightField, sample_brownian_ensemble, sample_weights
from .passage import horizontal_lpp, lattice_lpp

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass(frozen=True)
class Summary:
    count: int
    mean: float
    variance: float
    quantiles: tuple

    @classmethod
    def of(cls, samples):
        x = np.asarray(samples, dtype=float)
        var = float(x.var(ddof=1)) if len(x) > 1 else 0.0
        return cls(len(x), float(x.mean()), var, tuple(float(q) for q in np.quantile(x, QUANTILES)))

    def to_dict(self):
        return {"count": self.count, "mean": self.mean, "variance": self.variance,
                "quantiles": dict(zip([str(q) for q in QUANTILES], self.quantiles))}


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    stderr: float

    def to_dict(self):
        return {"slope": self.slope, "intercept": self.intercept, "stderr": self.stderr}


@dataclass
class StatsReport:
    summaries: dict = field(default_factory=dict)
    ks_statistic: Optional[float] = None
    ks_pvalue: Optional[float] = None
    exponent_fit: Optional[ExponentFit] = None
    bound_violations: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ks_statistic is not None and not 0.0 <= self.ks_statistic <= 1.0:
            raise ValueError("KS statistic must lie in [0, 1]")

    def to_dict(self):
        return {
            "summaries": {k: v.to_dict() for k, v in self.summaries.items()},
            "ks_statistic": self.ks_statistic,
            "ks_pvalue": self.ks_pvalue,
            "exponent_fit": None if self.exponent_fit is None else self.exponent_fit.to_dict(),
            "bound_violations": self.bound_violations,
            "extra": self.extra,
        }


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov distance and its asymptotic p-value.

    Returns ``(D, p)`` with ``D = sup |F_a - F_b|`` over the empirical CDFs and
    ``p`` from the Kolmogorov tail series at ``sqrt(n m / (n + m)) D``.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    ne = a.size * b.size / (a.size + b.size)
    return d, float(special.kolmogorov(math.sqrt(ne) * d))


def exponent_fit(points) -> ExponentFit:
    """Least-squares line through ``(log n, log scale)``."""
    pts = [(float(n), float(s)) for n, s in points]
    if len({n for n, _ in pts}) < 3:
        raise ValueError("exponent fit needs at least 3 distinct n values")
    if any(s <= 0 or n <= 0 for n, s in pts):
        raise ValueError("exponent fit needs positive n and scale values")
    logn = np.log([n for n, _ in pts])
    logs = np.log([s for _, s in pts])
    res = sps.linregress(logn, logs)
    return ExponentFit(float(res.slope), float(res.intercept), float(res.stderr))


@dataclass
class DiscrepancyReport:
    """``|L_F - L_w|`` against the row-maxima bound for a set of endpoint pairs.

    ``row_maxima[j]`` is ``max_i |w(i, j)|`` over the rectangle and ``bound``
    their sum; every pair is checked against the partial sum over the rows it
    crosses.
    """

    max_discrepancy: float
    bound: float
    row_maxima: np.ndarray
    violations: int
    pairs: int

    def to_dict(self):
        return {"max_discrepancy": self.max_discrepancy, "bound": self.bound,
                "row_maxima": [float(m) for m in self.row_maxima],
                "violations": self.violations, "pairs": self.pairs}


# accumulation-order slack; both passage times are sums of the same weights
_ROUNDING = 1e-12


def discrepancy_check(w: WeightField, frame=None, points=None) -> DiscrepancyReport:
    """Compare lattice and horizontal-step passage times on ``w``.

    The rectangle is ``[0, floor(n^beta)] x [0, n]`` for a frame, otherwise
    the whole field.  ``points`` is a list of ``(a, b)`` pairs; by default the
    two opposite corners.
    """
    if frame is not None:
        width, height = frame.width + 1, frame.n + 1
        if width > w.width or height > w.height:
            raise IndexError("weight field does not cover the frame's rectangle")
    else:
        width, height = w.width, w.height
    row_max = np.abs(w.block(0, width, 0, height)).max(axis=0)
    cum = np.concatenate([[0.0], np.cumsum(row_max)])
    if points is None:
        points = [((0, 0), (width - 1, height - 1))]
    worst, bad = 0.0, 0
    for a, b in points:
        if not (0 <= a[0] and 0 <= a[1] and b[0] < width and b[1] < height):
            raise IndexError(f"pair {a}..{b} outside the rectangle")
        if tuple(a) == tuple(b):
            continue
        diff = abs(horizontal_lpp(w, a, b).value - lattice_lpp(w, a, b).value)
        limit = cum[b[1]] - cum[a[1]]
        worst = max(worst, diff)
        if diff > limit + _ROUNDING * (1.0 + limit):
            bad += 1
    return DiscrepancyReport(worst, float(cum[-2]), row_max, bad, len(points))


def dkw_epsilon(n: int, alpha: float) -> float:
    """Half-width of the Dvoretzky-Kiefer-Wolfowitz band at level ``alpha``."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def dominance_violations(smaller, larger, alpha: float = 1e-3):
    """Check ``smaller <= larger`` stochastically, up to DKW bands.

    Dominance means ``F_smaller >= F_larger`` everywhere.  A violation is an
    evaluation point where ``F_larger - F_smaller`` exceeds the sum of the two
    bands.  Returns ``(count, max_deficit, argmax, band)``.
    """
    s = np.sort(np.asarray(smaller, dtype=float))
    g = np.sort(np.asarray(larger, dtype=float))
    pts = np.concatenate([s, g])
    fs = np.searchsorted(s, pts, side="right") / s.size
    fg = np.searchsorted(g, pts, side="right") / g.size
    band = dkw_epsilon(s.size, alpha) + dkw_epsilon(g.size, alpha)
    deficit = fg - fs
    worst = int(np.argmax(deficit))
    return int(np.count_nonzero(deficit > band)), float(deficit[worst]), float(pts[worst]), band


def bridge_maxima(replicas: int, seed: int, grid_step: float = 1e-3) -> np.ndarray:
    """``max |B - Bbar|`` over ``[0, 1]`` for independent Brownian paths.

    ``Bbar`` interpolates ``B`` linearly between times 0 and 1, so the
    difference is a Brownian bridge sampled on the grid.
    """
    ens = sample_brownian_ensemble(replicas, 1.0, grid_step, seed)
    t = ens.grid
    bridge = ens.values - np.outer(ens.values[:, -1], t)
    return np.abs(bridge).max(axis=1)


def bridge_dominance_test(replicas: int, seed: int, grid_step: float = 1e-3,
                          alpha: float = 1e-3) -> StatsReport:
    """Compare the bridge maximum with ``|Z1| v |Z2|`` for independent normals."""
    if replicas < 1000:
        raise ValueError("bridge dominance test needs at least 1000 replicas")
    s = bridge_maxima(replicas, derive_seed(seed, 1), grid_step)
    z = sample_weights(DistributionSpec("gaussian"), replicas, 2, derive_seed(seed, 2)).to_array()
    d = np.abs(z).max(axis=1)
    count, deficit, where, band = dominance_violations(s, d, alpha)
    ks, p = ks_two_sample(s, d)
    return StatsReport(
        summaries={"bridge_max": Summary.of(s), "normal_max": Summary.of(d)},
        ks_statistic=ks, ks_pvalue=p, bound_violations=count,
        extra={"max_cdf_deficit": deficit, "deficit_at": where, "band": band,
               "alpha": alpha, "grid_step": grid_step, "replicas": replicas},
    )
