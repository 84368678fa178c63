"""Weight environments and the line ensembles built from them.

All weight laws are shifted and scaled to mean 0 and variance 1.  Weights are
produced cell by cell from a counter-based generator, so a ``WeightField`` is
only a description (dimensions, law, seed) until cells are read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from ._rng import cell_open_uniform, cell_sign, cell_uniform, field_key
from ._normal import normal_quantile

FAMILIES = (
    "rademacher",
    "uniform",
    "centered-exponential",
    "centered-geometric",
    "gaussian",
    "symmetrized-pareto",
)

_DEFAULT_PARAMS = {
    "centered-geometric": {"q": 0.5},
    "symmetrized-pareto": {"a": 6.0},
}

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class DistributionSpec:
    """A normalised single-site weight law.

    ``params`` holds ``q`` for the centred geometric law (success ratio,
    ``P(G = k) = (1 - q) q**k``) and ``a`` for the symmetrised Pareto law
    (tail exponent, must exceed 2).
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown weight family {self.family!r}")
        merged = dict(_DEFAULT_PARAMS.get(self.family, {}))
        extra = set(self.params) - set(merged)
        if extra:
            raise ValueError(f"unexpected parameters {sorted(extra)} for {self.family}")
        merged.update({k: float(v) for k, v in self.params.items()})
        object.__setattr__(self, "params", merged)
        if self.family == "centered-geometric" and not 0.0 < merged["q"] < 1.0:
            raise ValueError("centered-geometric needs 0 < q < 1")
        if self.family == "symmetrized-pareto" and not merged["a"] > 2.0:
            raise ValueError("symmetrized-pareto needs tail exponent a > 2")

    def __hash__(self):
        return hash((self.family, tuple(sorted(self.params.items()))))

    @property
    def code(self) -> int:
        return FAMILIES.index(self.family)

    def kernel_params(self):
        """(code, p0, p1, p2) consumed by the compiled samplers."""
        if self.family == "centered-geometric":
            q = self.params["q"]
            return self.code, math.log(q), q / (1.0 - q), math.sqrt(q) / (1.0 - q)
        if self.family == "symmetrized-pareto":
            a = self.params["a"]
            return self.code, -1.0 / a, math.sqrt((a - 2.0) / a), 0.0
        return self.code, 0.0, 0.0, 0.0

    def to_dict(self):
        return {"family": self.family, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "family" not in d:
            raise ValueError("distribution must be an object with a 'family' key")
        return cls(d["family"], dict(d.get("params", {})))


@njit(cache=True, nogil=True)
def draw_weight(code, p0, p1, p2, key, i, j):
    if code == 0:
        return cell_sign(key, i, j, 0)
    if code == 1:
        return (2.0 * cell_uniform(key, i, j, 0) - 1.0) * _SQRT3
    if code == 2:
        return -math.log1p(-cell_uniform(key, i, j, 0)) - 1.0
    if code == 3:
        g = math.floor(math.log1p(-cell_uniform(key, i, j, 0)) / p0)
        return (g - p1) / p2
    if code == 4:
        return normal_quantile(cell_open_uniform(key, i, j, 0))
    # symmetrized pareto
    y = math.exp(p0 * math.log1p(-cell_uniform(key, i, j, 0)))
    return cell_sign(key, i, j, 1) * y * p1


@njit(cache=True, nogil=True)
def _fill_block(code, p0, p1, p2, key, i0, i1, j0, j1):
    out = np.empty((i1 - i0, j1 - j0))
    for i in range(i0, i1):
        for j in range(j0, j1):
            out[i - i0, j - j0] = draw_weight(code, p0, p1, p2, key, i, j)
    return out


@dataclass(frozen=True, eq=False)
class WeightField:
    """A ``width x height`` rectangle of i.i.d. weights ``w[i, j]``.

    ``i`` is the horizontal (column) index, ``j`` the vertical (row) index.
    Cells are generated on demand; ``table`` is set only for fields built from
    an explicit array.
    """

    width: int
    height: int
    dist: Optional[DistributionSpec]
    seed: int
    table: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("weight field needs width, height >= 1")

    @classmethod
    def from_array(cls, weights):
        """Wrap an explicit ``(width, height)`` array; mainly for tests."""
        arr = np.ascontiguousarray(weights, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("weights must be a 2-d array indexed [i, j]")
        arr.setflags(write=False)
        return cls(arr.shape[0], arr.shape[1], None, 0, arr)

    @property
    def key(self):
        return field_key(self.seed)

    def _check(self, i, j):
        if not (0 <= i < self.width and 0 <= j < self.height):
            raise IndexError(f"cell ({i}, {j}) outside {self.width}x{self.height} field")

    def weight(self, i: int, j: int) -> float:
        self._check(i, j)
        if self.table is not None:
            return float(self.table[i, j])
        return float(draw_weight(*self.dist.kernel_params(), self.key, i, j))

    def block(self, i0, i1, j0, j1) -> np.ndarray:
        """Weights of columns ``i0:i1`` and rows ``j0:j1`` as an array."""
        if not (0 <= i0 <= i1 <= self.width and 0 <= j0 <= j1 <= self.height):
            raise IndexError("block outside field")
        if self.table is not None:
            return self.table[i0:i1, j0:j1].copy()
        return _fill_block(*self.dist.kernel_params(), self.key, i0, i1, j0, j1)

    def to_array(self) -> np.ndarray:
        return self.block(0, self.width, 0, self.height)

    def kernel_source(self):
        """Arguments the compiled DP kernels use to read cells."""
        if self.table is not None:
            return (-1, 0.0, 0.0, 0.0, np.uint64(0), self.table)
        return (*self.dist.kernel_params(), self.key, _EMPTY_TABLE)


_EMPTY_TABLE = np.zeros((0, 0))


def sample_weights(dist: DistributionSpec, width: int, height: int, seed: int) -> WeightField:
    if width < 1 or height < 1:
        raise ValueError("weight field needs width, height >= 1")
    if not isinstance(dist, DistributionSpec):
        dist = DistributionSpec.from_dict(dist)
    return WeightField(int(width), int(height), dist, int(seed))


@dataclass(frozen=True, eq=False)
class LineEnsemble:
    """Piecewise-linear functions on the uniform grid ``0, step, ..., horizon``.

    ``values[i - 1]`` holds line ``i`` (lines are numbered from 1).
    """

    values: np.ndarray
    grid_step: float
    kind: str

    @property
    def line_count(self) -> int:
        return self.values.shape[0]

    @property
    def n_points(self) -> int:
        return self.values.shape[1]

    @property
    def horizon(self) -> float:
        return (self.n_points - 1) * self.grid_step

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.n_points) * self.grid_step

    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=1)

    def grid_index(self, u: float) -> int:
        """Index of grid point ``u``; raises if ``u`` is off the grid."""
        k = int(round(u / self.grid_step))
        if not 0 <= k < self.n_points or abs(k * self.grid_step - u) > 1e-9 * max(1.0, abs(u)):
            raise ValueError(f"{u} is not a grid point of [0, {self.horizon}] step {self.grid_step}")
        return k

    def evaluate(self, line: int, u):
        if not 1 <= line <= self.line_count:
            raise IndexError(f"line {line} outside 1..{self.line_count}")
        return np.interp(u, self.grid, self.values[line - 1])


def build_walk_ensemble(w: WeightField) -> LineEnsemble:
    """Partial sums of each row: line ``i`` uses row ``i - 1`` of the field."""
    values = np.zeros((w.height, w.width + 1))
    np.cumsum(w.to_array().T, axis=1, out=values[:, 1:])
    values.setflags(write=False)
    return LineEnsemble(values, 1.0, "walk")


def sample_brownian_ensemble(line_count: int, horizon: float, grid_step: float, seed: int) -> LineEnsemble:
    """Independent Brownian motions started at 0, sampled on a grid."""
    if not grid_step > 0:
        raise ValueError("grid step must be positive")
    if line_count < 1:
        raise ValueError("need at least one line")
    if horizon < grid_step:
        raise ValueError("horizon must be at least one grid step")
    steps = int(round(horizon / grid_step))
    if abs(steps * grid_step - horizon) > 1e-9 * horizon:
        raise ValueError("horizon must be a whole number of grid steps")
    gauss = sample_weights(DistributionSpec("gaussian"), steps, line_count, seed)
    values = np.zeros((line_count, steps + 1))
    np.cumsum(gauss.to_array().T * math.sqrt(grid_step), axis=1, out=values[:, 1:])
    values.setflags(write=False)
    return LineEnsemble(values, float(grid_step), "brownian")
