"""Last passage times and right-most geodesics.

Lattice passage times are computed column by column, so memory is linear in
the rectangle's height; only geodesic extraction keeps one decision byte per
cell.  Ties are compared exactly: the DP accumulates weights in path order, so
two maximisers with equal sums produce bit-identical floats.

Conventions used throughout:

* ``lattice_lpp(a, b)`` collects every vertex of the path except ``b``.
* ``horizontal_lpp(a, b)`` collects the vertices from which the path (extended
  to ``b``) takes a horizontal step.
* Line ``i`` of a walk ensemble is row ``i - 1`` of its weight field, so
  ``semidiscrete_lpp(F, x, m, y, n) == horizontal_lpp((x, m - 1), (y, n - 1))``.
* Geodesic profiles include the endpoint ``b``; ``entry[j]`` is the left-most
  horizontal coordinate the path occupies on level ``j``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

from .environment import LineEnsemble, WeightField, draw_weight

LATTICE = 0
HORIZONTAL = 1


class LatticePoint(NamedTuple):
    u: int
    v: int

    def __le__(self, other):
        return self.u <= other[0] and self.v <= other[1]


@dataclass(frozen=True, eq=False)
class GeodesicProfile:
    start_level: int
    end_level: int
    entry: np.ndarray
    end_position: float

    def __post_init__(self):
        if len(self.entry) != self.end_level - self.start_level + 1:
            raise ValueError("one entry per level required")
        e = np.asarray(self.entry, dtype=float)
        if len(e) and (np.any(np.diff(e) < 0) or e[-1] > self.end_position):
            raise ValueError("geodesic entries must be non-decreasing")

    @property
    def levels(self):
        return np.arange(self.start_level, self.end_level + 1)

    def at(self, v: float) -> float:
        if not self.start_level <= v <= self.end_level:
            raise ValueError(f"level {v} outside [{self.start_level}, {self.end_level}]")
        return float(self.entry[math.floor(v) - self.start_level])

    def to_dict(self):
        return {
            "start_level": self.start_level,
            "end_level": self.end_level,
            "end_position": self.end_position,
            "entry": [float(e) for e in self.entry],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["start_level"]), int(d["end_level"]),
                   np.asarray(d["entry"], dtype=float), float(d["end_position"]))

    def csv_rows(self):
        return [(int(lv), float(e)) for lv, e in zip(self.levels, self.entry)]


@dataclass(frozen=True, eq=False)
class PassageResult:
    value: float
    geodesic: Optional[GeodesicProfile] = None

    def to_dict(self):
        return {
            "value": self.value,
            "geodesic": None if self.geodesic is None else self.geodesic.to_dict(),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        g = d.get("geodesic")
        return cls(float(d["value"]), None if g is None else GeodesicProfile.from_dict(g))


@njit(cache=True, nogil=True, inline="always")
def _cell(code, p0, p1, p2, key, table, i, j):
    if code < 0:
        return table[i, j]
    return draw_weight(code, p0, p1, p2, key, i, j)


@njit(cache=True, nogil=True)
def _lattice_kernel(code, p0, p1, p2, key, table, au, av, bu, bv, mode, want):
    nrow = bv - av + 1
    ncol = bu - au + 1
    prev = np.empty(nrow)
    cur = np.empty(nrow)
    wcol = np.zeros(nrow)
    if want:
        bits = np.zeros((ncol, nrow), dtype=np.uint8)
    else:
        bits = np.zeros((1, 1), dtype=np.uint8)
    for u in range(au, bu + 1):
        cu = u - au
        if mode == HORIZONTAL:
            # candidate for a horizontal step into column u
            if cu > 0:
                for r in range(nrow):
                    prev[r] += wcol[r]
            if u < bu:
                for r in range(nrow):
                    wcol[r] = _cell(code, p0, p1, p2, key, table, u, av + r)
        else:
            last = nrow - 1 if u == bu else nrow
            for r in range(last):
                wcol[r] = _cell(code, p0, p1, p2, key, table, u, av + r)
            if u == bu:
                wcol[nrow - 1] = 0.0
        if cu == 0:
            cur[0] = wcol[0] if mode == LATTICE else 0.0
            for r in range(1, nrow):
                cur[r] = cur[r - 1] + wcol[r] if mode == LATTICE else cur[r - 1]
                if want:
                    bits[0, r] = 1
        else:
            hc = prev[0]
            cur[0] = hc + wcol[0] if mode == LATTICE else hc
            for r in range(1, nrow):
                hc = prev[r]
                vc = cur[r - 1]
                # right-most rule: on ties take the step from below
                up = vc >= hc
                best = vc if up else hc
                cur[r] = best + wcol[r] if mode == LATTICE else best
                if want:
                    bits[cu, r] = up
        prev, cur = cur, prev
    return prev[nrow - 1], bits


@njit(cache=True, nogil=True)
def _trace(bits, au, av, bu, bv):
    """Entry column of each level, walking back from ``b``."""
    entry = np.empty(bv - av + 1, dtype=np.int64)
    u, v = bu, bv
    entry[v - av] = u
    while u > au or v > av:
        if bits[u - au, v - av]:
            v -= 1
        else:
            u -= 1
        entry[v - av] = u
    return entry


def _as_point(p) -> LatticePoint:
    u, v = p
    if int(u) != u or int(v) != v:
        raise ValueError(f"lattice point {p!r} must have integer coordinates")
    return LatticePoint(int(u), int(v))


def _ordered(a, b):
    if not (a.u <= b.u and a.v <= b.v):
        raise ValueError(f"need a <= b componentwise, got {tuple(a)} and {tuple(b)}")


def lattice_lpp(w: WeightField, a, b, want_geodesic: bool = False) -> PassageResult:
    """Maximum weight of an up-right path from ``a`` that stops just before ``b``."""
    a, b = _as_point(a), _as_point(b)
    _ordered(a, b)
    if a == b:
        raise ValueError("lattice passage time needs a != b")
    max_u = b.u if b.v > a.v else b.u - 1
    max_v = b.v if b.u > a.u else b.v - 1
    if a.u < 0 or a.v < 0 or max_u >= w.width or max_v >= w.height:
        raise IndexError(f"rectangle {tuple(a)}..{tuple(b)} leaves the {w.width}x{w.height} field")
    value, bits = _lattice_kernel(*w.kernel_source(), a.u, a.v, b.u, b.v, LATTICE, want_geodesic)
    return _result(value, bits, a, b, want_geodesic)


def horizontal_lpp(w: WeightField, a, b, want_geodesic: bool = False) -> PassageResult:
    """Maximum over paths ``a -> b`` of the weights at horizontal-step vertices."""
    a, b = _as_point(a), _as_point(b)
    _ordered(a, b)
    if a.u < 0 or a.v < 0 or b.u > w.width or b.v >= w.height:
        raise IndexError(f"rectangle {tuple(a)}..{tuple(b)} leaves the {w.width}x{w.height} field")
    value, bits = _lattice_kernel(*w.kernel_source(), a.u, a.v, b.u, b.v, HORIZONTAL, want_geodesic)
    return _result(value, bits, a, b, want_geodesic)


def _result(value, bits, a, b, want):
    geo = None
    if want:
        entry = _trace(bits, a.u, a.v, b.u, b.v).astype(float)
        geo = GeodesicProfile(a.v, b.v, entry, float(b.u))
    return PassageResult(float(value), geo)


@njit(cache=True, nogil=True)
def _semidiscrete_kernel(incr, m, n, kx, ky):
    nl = n - m + 1
    nk = ky - kx + 1
    bits = np.zeros((nk, nl), dtype=np.uint8)
    prev = np.empty(nl)
    cur = np.empty(nl)
    for c in range(nk):
        k = kx + c
        for r in range(nl):
            if c == 0 and r == 0:
                best = 0.0
            elif c == 0:
                best = cur[r - 1]
                bits[c, r] = 1
            else:
                hc = prev[r] + incr[m + r - 1, k - 1]
                if r == 0:
                    best = hc
                else:
                    vc = cur[r - 1]
                    if vc >= hc:
                        best = vc
                        bits[c, r] = 1
                    else:
                        best = hc
            cur[r] = best
        prev, cur = cur, prev
    return prev[nl - 1], bits


def semidiscrete_lpp(F: LineEnsemble, x: float, m: int, y: float, n: int,
                     want_geodesic: bool = False) -> PassageResult:
    """Semi-discrete passage time from ``(x, m)`` to ``(y, n)`` over the lines of ``F``.

    Jumps between lines are restricted to grid points, which loses nothing for
    piecewise-linear lines.
    """
    if not 1 <= m <= n <= F.line_count:
        raise ValueError(f"need 1 <= m <= n <= {F.line_count}, got m={m}, n={n}")
    if x > y:
        raise ValueError("need x <= y")
    kx, ky = F.grid_index(x), F.grid_index(y)
    value, bits = _semidiscrete_kernel(F.increments(), m, n, kx, ky)
    geo = None
    if want_geodesic:
        entry = _trace(bits, kx, m, ky, n).astype(float) * F.grid_step
        geo = GeodesicProfile(m, n, entry, float(y))
    return PassageResult(float(value), geo)


def geodesic_gamma(result: PassageResult, v: float) -> float:
    """Horizontal position at which the geodesic reaches level ``floor(v)``."""
    if result.geodesic is None:
        raise ValueError("passage result carries no geodesic")
    return result.geodesic.at(v)


def profile_path(profile: GeodesicProfile):
    """Lattice vertices of an integer geodesic profile, endpoint included."""
    cells = []
    entry = [int(e) for e in profile.entry]
    end = int(profile.end_position)
    for r, level in enumerate(profile.levels):
        stop = entry[r + 1] if r + 1 < len(entry) else end
        cells.extend((u, int(level)) for u in range(entry[r], stop + 1))
    return cells


def path_weight(w: WeightField, cells, horizontal: bool = False) -> float:
    """Re-sum a path's weights in path order under either collection rule."""
    total = 0.0
    for k in range(len(cells) - 1):
        u, v = cells[k]
        if not horizontal or cells[k + 1][0] == u + 1:
            total = total + w.weight(u, v)
    return total
