"""Thin-rectangle coordinates and the rescaled observables.

A frame ``(n, beta)`` looks at rectangles of size ``n**beta x n``.  Space-time
points ``(x, t)`` map to the lattice point
``(floor(t n^beta + 2 x n^(beta - 1/3)), floor(t n))``, passage times are
centred and scaled by ``n^((1 - 3 beta)/6)``, and geodesic positions by
``2 n^(beta - 1/3)``.

``beta`` is kept as an exact rational and lattice coordinates are evaluated
in 60-digit arithmetic before flooring, so the same frame yields the same
rectangle on every platform.
"""

from __future__ import annotations

import csv
import io
import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .melon import Melon
from .passage import GeodesicProfile, LatticePoint

_DPS = 60
_SNAP = mpmath.mpf("1e-40")


def as_fraction(beta) -> Fraction:
    if isinstance(beta, Fraction):
        return beta
    if isinstance(beta, float):
        return Fraction(repr(beta))
    return Fraction(str(beta).strip())


def _mpf(x):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


@dataclass(frozen=True)
class ScalingFrame:
    n: int
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "beta", as_fraction(self.beta))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("frame needs an integer n >= 2")
        object.__setattr__(self, "n", int(self.n))
        if not self.beta > 1:
            raise ValueError("frame needs beta > 1")

    @property
    def passage_exponent(self) -> Fraction:
        return (1 - 3 * self.beta) / 6

    @property
    def transversal_exponent(self) -> Fraction:
        return self.beta - Fraction(1, 3)

    def power(self, exponent) -> float:
        return _power(self.n, Fraction(exponent))

    @property
    def width(self) -> int:
        """``floor(n ** beta)``, computed exactly."""
        p, q = self.beta.numerator, self.beta.denominator
        target = self.n ** p
        with mpmath.workdps(_DPS):
            m = int(mpmath.floor(mpmath.power(self.n, _mpf(self.beta))))
        while (m + 1) ** q <= target:
            m += 1
        while m ** q > target:
            m -= 1
        return m

    def to_dict(self):
        return {"n": self.n, "beta": str(self.beta)}


@dataclass(frozen=True)
class RescaledSample:
    frame: ScalingFrame
    point: tuple
    value: float
    seed: int = 0

    def __post_init__(self):
        if not self.point[1] < self.point[3]:
            raise ValueError("rescaled sample needs t < s")
        if not math.isfinite(self.value):
            raise ValueError("rescaled value must be finite")


@lru_cache(maxsize=4096)
def _power(n, exponent):
    with mpmath.workdps(_DPS):
        return float(mpmath.power(n, _mpf(exponent)))


def coord_map(x: float, t: float, frame: ScalingFrame) -> LatticePoint:
    return _coord_map(x, t, frame)


@lru_cache(maxsize=4096)
def _coord_map(x, t, frame):
    with mpmath.workdps(_DPS):
        n = mpmath.mpf(frame.n)
        beta = _mpf(frame.beta)
        horiz = _mpf(t) * mpmath.power(n, beta) + 2 * _mpf(x) * mpmath.power(n, beta - mpmath.mpf(1) / 3)
        nearest = mpmath.nint(horiz)
        u = int(nearest) if abs(horiz - nearest) < _SNAP else int(mpmath.floor(horiz))
    if u < 0:
        raise ValueError(f"point (x={x}, t={t}) maps to negative column {u}")
    v = math.floor(Fraction(t) * frame.n)
    return LatticePoint(u, v)


def _shift(point, frame):
    x, t, y, s = point
    return 2 * (s - t) * frame.power(Fraction(2, 3)) + 2 * (y - x) * frame.power(Fraction(1, 3))


def rescale_passage(L: float, point, frame: ScalingFrame, seed: int = 0) -> RescaledSample:
    x, t, y, s = point
    if not t < s:
        raise ValueError("need t < s")
    value = frame.power(frame.passage_exponent) * L - _shift(point, frame)
    return RescaledSample(frame, tuple(point), float(value), seed)


def unscale_passage(d: float, point, frame: ScalingFrame) -> float:
    """Inverse of :func:`rescale_passage`."""
    return (d + _shift(point, frame)) / frame.power(frame.passage_exponent)


def rescale_melon(m: Melon, frame: ScalingFrame, ys) -> np.ndarray:
    """Rescaled melon lines, shape ``(k, len(ys))``.

    The melon must have been evaluated at ``coord_map(y, 1).u`` for each ``y``.
    """
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    scale = frame.power(frame.passage_exponent)
    grid = {float(g): j for j, g in enumerate(m.eval_grid)}
    out = np.empty((m.k, len(ys)))
    for c, y in enumerate(ys):
        u = float(coord_map(y, 1, frame).u)
        if u not in grid:
            raise ValueError(f"melon not evaluated at column {u} (y={y})")
        out[:, c] = scale * m.lines[:, grid[u]] - 2 * frame.power(Fraction(2, 3)) - 2 * y * frame.power(Fraction(1, 3))
    return out


def rescale_geodesic(g: GeodesicProfile, frame: ScalingFrame, v: float, point=(0, 0, 0, 1)) -> float:
    """Rescaled geodesic position at fraction ``v`` of the way from ``t`` to ``s``."""
    if not 0.0 <= v <= 1.0:
        raise ValueError("v must lie in [0, 1]")
    x, t, y, s = point
    lo, hi = math.floor(Fraction(t) * frame.n), math.floor(Fraction(s) * frame.n)
    if g.start_level != lo or g.end_level != hi:
        raise ValueError(f"geodesic spans levels {g.start_level}..{g.end_level}, expected {lo}..{hi}")
    level = lo + v * (hi - lo)
    tilt = frame.power(frame.transversal_exponent)
    centre = frame.power(frame.beta) * (t + v * (s - t)) + 2 * tilt * (x + v * (y - x))
    return (g.at(level) - centre) / (2 * (s - t) ** (2 / 3) * tilt)


def unscale_geodesic(z: float, frame: ScalingFrame, v: float) -> float:
    """Raw displacement ``gamma(v n) - v n^beta`` from a rescaled value."""
    return z * 2 * frame.power(frame.transversal_exponent)


SAMPLE_COLUMNS = ("n", "beta", "x", "t", "y", "s", "value", "seed")


def rescaled_csv(samples) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(SAMPLE_COLUMNS)
    for smp in samples:
        x, t, y, s = smp.point
        out.writerow([smp.frame.n, str(smp.frame.beta), repr(x), repr(t), repr(y), repr(s),
                      repr(smp.value), smp.seed])
    return buf.getvalue()
