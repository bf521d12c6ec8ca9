"""Lattice geometry, signals, norms, and the elementary series bounds."""
import math

import numpy as np
import pytest

from rieszlat.lattice import (
    P_INF,
    DiscreteCube,
    Exponents,
    LatticeSignal,
    coordinate_sum_margin,
    covering_cube,
    elementary_inequalities,
    grid_points,
    lp_norm,
    norm_1,
    norm_2,
    norm_inf,
    partial_sum,
    power_law_term,
    product_bound_margin,
    series_tail_bound,
)


def test_grid_points_lexicographic():
    pts = grid_points((-1, 0), (1, 1))
    assert pts.shape == (6, 2)
    as_tuples = [tuple(row) for row in pts]
    assert as_tuples[0] == (-1, 0)
    assert as_tuples[-1] == (1, 1)
    assert as_tuples == sorted(as_tuples)


def test_grid_points_empty_when_inverted():
    assert len(grid_points((1,), (0,))) == 0


def test_norms_on_points():
    assert norm_1((3, -4)) == 7
    assert norm_2((3, -4)) == 5.0
    assert norm_inf((3, -4)) == 4


def test_cube_geometry():
    q = DiscreteCube((1, -2), 3)
    assert q.n == 2
    assert q.side == 7
    assert q.cardinality == 49
    assert q.lo == (-2, -5)
    assert q.hi == (4, 1)
    assert q.contains((4, -5))
    assert not q.contains((5, -5))
    big = q.dilate(2)
    assert big.radius == 6
    assert big.center == q.center


def test_cube_rejects_bad_radius():
    with pytest.raises(ValueError):
        DiscreteCube((0,), -1)


def test_covering_cube_of_support():
    b = LatticeSignal.from_values({(2, 0): 1.0, (-1, 3): -2.0})
    q = covering_cube(b.points())
    for j in b.points():
        assert q.contains(j)
    assert b.support_box.contains((2, 0))


def test_signal_roundtrip_dense():
    b = LatticeSignal.from_values({(0, 0): 1.5, (1, -1): -2.0})
    arr = b.to_array((-1, -1), (3, 3))
    back = LatticeSignal.from_array(arr, (-1, -1))
    assert back == b


def test_signal_to_array_guards_box():
    b = LatticeSignal.from_values({(4,): 1.0})
    with pytest.raises(ValueError):
        b.to_array((0,), (3,))


def test_signal_drops_explicit_zeros():
    b = LatticeSignal.from_values({(0,): 0.0, (1,): 2.0})
    assert b.support_size == 1
    assert b((0,)) == 0.0


def test_signal_arithmetic():
    a = LatticeSignal.from_values({(0,): 1.0, (1,): -3.0})
    b = LatticeSignal.delta((1,))
    c = a + b.scaled(3.0)
    assert c((1,)) == 0.0
    assert c.support_size == 1
    d = a.translated((5,))
    assert d((6,)) == -3.0
    assert (a - a).is_zero
    assert a.abs()((1,)) == 3.0
    assert a.abs_powered(0.5)((1,)) == pytest.approx(math.sqrt(3.0), rel=1e-15)


def test_indicator_matches_cube():
    q = DiscreteCube((0, 0), 1)
    chi = LatticeSignal.indicator(q)
    assert chi.support_size == 9
    assert all(chi(j) == 1.0 for j in q.points())


def test_lp_norm_frozen_values():
    b = LatticeSignal.from_values({(0,): 3.0, (2,): -4.0})
    assert lp_norm(b, 1.0) == 7.0
    assert lp_norm(b, 2.0) == 5.0
    assert lp_norm(b, P_INF) == 4.0
    # quasi-norm branch: (3^(1/2) + 4^(1/2))^2
    expected = (3.0**0.5 + 2.0) ** 2
    assert lp_norm(b, 0.5) == pytest.approx(expected, rel=1e-15)


def test_lp_norm_homogeneous():
    rng = np.random.default_rng(7)
    vals = {(int(k),): float(v) for k, v in enumerate(rng.normal(size=12))}
    b = LatticeSignal.from_values(vals)
    for p in (0.5, 1.0, 1.5, 2.0, P_INF):
        assert lp_norm(b.scaled(4.0), p) == pytest.approx(4.0 * lp_norm(b, p), rel=1e-14)


def test_lp_norm_rejects_nonpositive_p():
    b = LatticeSignal.delta((0,))
    with pytest.raises(ValueError):
        lp_norm(b, 0.0)


def test_lp_quasi_triangle_below_one():
    # for p < 1 the p-th powers are subadditive
    a = LatticeSignal.from_values({(0,): 1.0, (1,): 2.0})
    b = LatticeSignal.from_values({(1,): -1.5, (3,): 0.25})
    p = 0.5
    lhs = lp_norm(a + b, p) ** p
    rhs = lp_norm(a, p) ** p + lp_norm(b, p) ** p
    assert lhs <= rhs * (1.0 + 1e-12)


def test_exponents_sobolev_relation():
    e = Exponents.from_p_alpha(1.5, 0.5, 1)
    assert e.q == pytest.approx(1.0 / (1.0 / 1.5 - 0.5), rel=1e-15)
    with pytest.raises(ValueError):
        Exponents.from_p_alpha(4.0, 0.9, 1)  # 1/q would be negative


def test_partial_sum_frozen_shell_two_dim():
    # radius-2 box around 0 in Z^2, term |v|^(-3), 24 nonzero points,
    # enumerated independently: 4/1 + 4/2^1.5 + 4/8 + 8/5^1.5 + 4/8^1.5
    expected = 6.806532010469668
    got = partial_sum(power_law_term(3.0), 2, 2)
    assert got == pytest.approx(expected, rel=1e-14)


def test_partial_sum_circular_at_most_quadratic():
    term = power_law_term(2.5)
    for n in (1, 2):
        for r in (1, 3, 8):
            circ = partial_sum(term, n, r, mode="circular")
            quad = partial_sum(term, n, r, mode="quadratic")
            assert circ <= quad * (1.0 + 1e-12)


def test_partial_sum_monotone_in_radius():
    term = power_law_term(3.0)
    vals = [partial_sum(term, 2, r) for r in (1, 2, 4, 8, 16)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_partial_sum_rejects_bad_arguments():
    with pytest.raises(ValueError):
        partial_sum(power_law_term(2.0), 1, 3, mode="spherical")
    with pytest.raises(ValueError):
        partial_sum(power_law_term(2.0), 1, -1)


def test_power_law_vanishes_at_origin():
    term = power_law_term(2.0)
    vals = term(np.array([[0, 0], [0, 1], [3, 4]]))
    assert vals[0] == 0.0
    assert vals[1] == 1.0
    assert vals[2] == pytest.approx(1.0 / 25.0, rel=1e-15)


def test_series_bound_dominates_partial_sums():
    # one dimension, eps = 1: partial S_64 = 2 * sum_{k<=64} k^-2,
    # value frozen from a direct 64-term evaluation
    s64 = partial_sum(power_law_term(2.0), 1, 64)
    assert s64 == pytest.approx(3.258861002817774, rel=1e-14)
    assert s64 <= series_tail_bound(1, 1.0)
    for n in (1, 2, 3):
        for eps in (0.5, 1.0, 2.0):
            s = partial_sum(power_law_term(n + eps), n, 32)
            assert s <= series_tail_bound(n, eps)


def test_series_bound_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        series_tail_bound(2, 0.0)


def test_elementary_inequalities_hold_on_window():
    for n in (1, 2, 3):
        for k in grid_points([-4] * n, [4] * n):
            if not k.any():
                continue
            for eps in (0.0, 0.5, 1.0):
                first, second = elementary_inequalities(tuple(k), eps)
                assert first and second


def test_elementary_inequalities_reject_origin():
    with pytest.raises(ValueError):
        elementary_inequalities((0, 0), 1.0)


def test_margins_nonpositive_and_tight():
    pts = grid_points((-3, -3), (3, 3))
    pts = pts[np.any(pts != 0, axis=1)]
    assert coordinate_sum_margin(pts).max() <= 1e-9
    assert product_bound_margin(pts, 2, 0.5).max() <= 1e-9
    # equality case for the coordinate sum: n = 1 makes both sides |k|
    axis = np.array([[1], [-2], [5]])
    assert coordinate_sum_margin(axis).max() == 0.0
    assert coordinate_sum_margin(axis).min() == 0.0
