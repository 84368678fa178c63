"""Top lines of the melon of a line ensemble.

The sum of the top ``k`` melon lines at ``y`` is the best total increment
collected by ``k`` non-intersecting up-going paths on ``[0, y)`` that all end
on the last line.  With jumps restricted to grid points the paths are
described, interval by interval, by a strictly increasing ``k``-tuple of line
indices, and the optimum is a dynamic program over those tuples.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass

import numpy as np
from numba import njit

from .environment import LineEnsemble
from .oracles import melon_oracle  # noqa: F401


@dataclass(frozen=True, eq=False)
class Melon:
    """``lines[i - 1, j]`` is melon line ``i`` at ``eval_grid[j]``.

    ``cumulative[i - 1, j]`` is the sum of the top ``i`` lines there.
    """

    k: int
    eval_grid: np.ndarray
    lines: np.ndarray
    cumulative: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["y"] + [f"line{i}" for i in range(1, self.k + 1)])
        for j, y in enumerate(self.eval_grid):
            out.writerow([repr(float(y))] + [repr(float(v)) for v in self.lines[:, j]])
        return buf.getvalue()


def _tuple_states(n, k):
    """Strictly increasing k-tuples (0-based lines) in lexicographic order.

    ``down[s, d]`` is the state obtained by lowering coordinate ``d`` of
    ``s`` by one, or -1 when that breaks strict ordering.
    """
    states = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
    index = {tuple(s): i for i, s in enumerate(states)}
    down = np.full(states.shape, -1, dtype=np.int64)
    for i, s in enumerate(states):
        for d in range(k):
            t = list(s)
            t[d] -= 1
            down[i, d] = index.get(tuple(t), -1)
    return states, down


@njit(cache=True, nogil=True)
def _topk_kernel(incr, states, down, eval_idx):
    """Best k-path totals at each grid index in ``eval_idx`` (sorted)."""
    n_states, k = states.shape
    val = np.zeros(n_states)
    out = np.empty(eval_idx.shape[0])
    e = 0
    step = 0
    while e < eval_idx.shape[0]:
        while e < eval_idx.shape[0] and eval_idx[e] == step:
            best = -np.inf
            for s in range(n_states):
                if val[s] > best:
                    best = val[s]
            out[e] = best
            e += 1
        if e == eval_idx.shape[0]:
            break
        # accrue the increment of every occupied line over [step, step + 1)
        for s in range(n_states):
            acc = val[s]
            for d in range(k):
                acc += incr[states[s, d], step]
            val[s] = acc
        step += 1
        # upward jumps at the new grid point: prefix max over the product order
        for s in range(n_states):
            for d in range(k):
                p = down[s, d]
                if p >= 0 and val[p] > val[s]:
                    val[s] = val[p]
    return out


def melon_topk(F: LineEnsemble, k: int, eval_grid) -> Melon:
    """Top ``k`` melon lines of ``F`` at the grid positions ``eval_grid``."""
    n = F.line_count
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n} lines, got k={k}")
    ys = np.atleast_1d(np.asarray(eval_grid, dtype=float))
    idx = np.array([F.grid_index(y) for y in ys], dtype=np.int64)
    order = np.argsort(idx, kind="stable")
    incr = np.ascontiguousarray(F.increments())
    cumulative = np.empty((k, len(ys)))
    for j in range(1, k + 1):
        states, down = _tuple_states(n, j)
        res = _topk_kernel(incr, states, down, idx[order])
        cumulative[j - 1, order] = res
    lines = np.diff(cumulative, axis=0, prepend=0.0)
    return Melon(k, ys, lines, cumulative)
