"""Exhaustive enumeration references for small instances.

These deliberately share no code with the dynamic programs they check: paths
are listed explicitly and summed one by one.
"""

from __future__ import annotations

import itertools

import numpy as np

from .environment import LineEnsemble

MAX_LATTICE_STEPS = 16


def lattice_paths(a, b):
    """All up-right vertex sequences from ``a`` to ``b``, both ends included."""
    du, dv = b[0] - a[0], b[1] - a[1]
    if du < 0 or dv < 0:
        return []
    if du + dv > MAX_LATTICE_STEPS:
        raise ValueError("instance too large for enumeration")
    paths = []
    for ups in itertools.combinations(range(du + dv), dv):
        u, v = a
        cells = [(u, v)]
        for step in range(du + dv):
            if step in ups:
                v += 1
            else:
                u += 1
            cells.append((u, v))
        paths.append(cells)
    return paths


def _score(weights, cells, horizontal):
    total = 0.0
    for k in range(len(cells) - 1):
        u, v = cells[k]
        if not horizontal or cells[k + 1][0] == u + 1:
            total = total + weights[u, v]
    return total


def brute_lpp(weights, a, b, horizontal=False):
    """(value, right-most maximiser) by listing every path.

    The right-most maximiser is the one whose entry column on every level is
    largest; ``None`` is returned for it if no maximiser dominates all others
    levelwise (which would contradict the lattice structure of geodesics).
    """
    weights = np.asarray(weights)
    paths = lattice_paths(a, b)
    scores = [_score(weights, p, horizontal) for p in paths]
    best = max(scores)
    winners = [entries(p, a[1], b[1]) for p, s in zip(paths, scores) if s == best]
    top = np.max(np.array(winners), axis=0)
    if not any(np.array_equal(top, e) for e in winners):
        return best, None
    return best, top


def entries(cells, start_level, end_level):
    out = np.empty(end_level - start_level + 1)
    seen = set()
    for u, v in cells:
        if v not in seen:
            seen.add(v)
            out[v - start_level] = u
    return out


def brute_semidiscrete(F: LineEnsemble, kx, m, ky, n):
    """Maximum over grid jump times ``kx = z_{m-1} <= ... <= z_n = ky``.

    Returns the value and the right-most maximising jump sequence as entry
    grid indices per line (``z_{j-1}`` for line ``j``).
    """
    vals = F.values
    seqs, totals = [], []
    for mids in itertools.combinations_with_replacement(range(kx, ky + 1), n - m):
        z = (kx,) + mids + (ky,)
        total = 0.0
        for r, line in enumerate(range(m, n + 1)):
            total += vals[line - 1, z[r + 1]] - vals[line - 1, z[r]]
        seqs.append(z[:-1])
        totals.append(total)
    best = max(totals)
    tol = 1e-10 * max(1.0, abs(best))
    winners = np.array([s for s, t in zip(seqs, totals) if t >= best - tol], dtype=float)
    top = winners.max(axis=0)
    if not any(np.array_equal(top, s) for s in winners):
        return best, None
    return best, top


def melon_oracle(F: LineEnsemble, k: int, y: float) -> float:
    """Exact top-``k`` melon sum at ``y`` by enumerating path families.

    Each of the ``k`` paths is a non-decreasing level sequence, one level per
    grid interval of ``[0, y)``; at every interval the levels must be strictly
    increasing across paths.  All paths end at line ``n`` at time ``y``, which
    costs nothing.  Guard rails: ``n <= 4``, at most 8 grid points, ``k <= 3``.
    """
    n = F.line_count
    if n > 4 or k > 3 or F.n_points > 8:
        raise ValueError("melon oracle limited to n <= 4, k <= 3, <= 8 grid points")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}")
    ky = F.grid_index(y)
    incr = F.increments()
    states = list(itertools.combinations(range(1, n + 1), k))
    best = -np.inf

    def walk(step, state, acc):
        nonlocal best
        if step == ky:
            best = max(best, acc)
            return
        for nxt in states:
            if state is None or all(p <= q for p, q in zip(state, nxt)):
                gain = 0.0
                for line in nxt:
                    gain += incr[line - 1, step]
                walk(step + 1, nxt, acc + gain)

    if ky == 0:
        return 0.0
    walk(0, None, 0.0)
    return float(best)
