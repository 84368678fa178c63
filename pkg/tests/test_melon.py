import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thinscale import (DistributionSpec, LineEnsemble, WeightField, build_walk_ensemble,
                       melon_oracle, melon_topk, sample_weights, semidiscrete_lpp)
from thinscale.verify import melon_invariant_failures


def _ensemble(points, lines, seed, family="gaussian"):
    return build_walk_ensemble(sample_weights(DistributionSpec(family), points - 1, lines, seed))


def test_single_line_single_path():
    F = _ensemble(7, 1, 3)
    m = melon_topk(F, 1, F.grid)
    np.testing.assert_allclose(m.lines[0], F.values[0] - F.values[0, 0], atol=1e-12)


def test_k_equals_n_sum_preserved():
    F = _ensemble(9, 4, 5)
    m = melon_topk(F, 4, F.grid)
    np.testing.assert_allclose(m.lines.sum(axis=0), F.values.sum(axis=0), atol=1e-9)


def test_matches_oracle_n3_k2():
    F = _ensemble(5, 3, 21)
    m = melon_topk(F, 2, F.grid)
    for j, y in enumerate(F.grid):
        assert m.cumulative[0, j] == pytest.approx(melon_oracle(F, 1, y), abs=1e-9)
        assert m.cumulative[1, j] == pytest.approx(melon_oracle(F, 2, y), abs=1e-9)


def test_oracle_k1_is_passage_time():
    F = _ensemble(4, 3, 2)
    for y in F.grid:
        assert melon_oracle(F, 1, y) == pytest.approx(semidiscrete_lpp(F, 0, 1, y, 3).value, abs=1e-12)


def test_oracle_two_lines_forced():
    # with k = n the two paths stay on their own lines
    vals = np.array([[0.0, 1.0, -2.0], [0.0, 0.5, 4.0]])
    F = LineEnsemble(vals, 1.0, "walk")
    assert melon_oracle(F, 2, 2.0) == pytest.approx(-2.0 + 4.0)


def test_oracle_guard_rails():
    F = _ensemble(12, 3, 2)
    with pytest.raises(ValueError):
        melon_oracle(F, 2, 3.0)


def test_invalid_k():
    F = _ensemble(4, 2, 1)
    with pytest.raises(ValueError):
        melon_topk(F, 3, F.grid)
    with pytest.raises(ValueError):
        melon_topk(F, 0, F.grid)


def test_eval_grid_order_irrelevant():
    F = _ensemble(30, 5, 8)
    ys = np.array([29.0, 3.0, 17.0, 0.0])
    a = melon_topk(F, 3, ys)
    b = melon_topk(F, 3, np.sort(ys))
    for c, y in enumerate(ys):
        j = int(np.searchsorted(np.sort(ys), y))
        np.testing.assert_allclose(a.lines[:, c], b.lines[:, j], atol=1e-12)


def test_csv_layout():
    F = _ensemble(3, 2, 1)
    text = melon_topk(F, 2, F.grid).to_csv()
    rows = text.strip().split("\n")
    assert rows[0] == "y,line1,line2"
    assert len(rows) == 1 + F.n_points


def test_melon_on_brownian_lines_is_ordered():
    from thinscale import sample_brownian_ensemble
    F = sample_brownian_ensemble(4, 1.0, 0.01, 9)
    m = melon_topk(F, 4, F.grid[::10])
    assert np.all(np.diff(m.lines, axis=0) <= 1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.integers(1, 4), st.integers(0, 2 ** 62),
       st.sampled_from(["gaussian", "rademacher", "centered-geometric"]))
def test_invariants_property(points, lines, seed, family):
    assert melon_invariant_failures(_ensemble(points, lines, seed, family)) == 0
