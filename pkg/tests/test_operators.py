"""Riesz potential, majorants, Poisson and fractional maximal operators."""
import math

import numpy as np
import pytest

from rieszlat.lattice import DiscreteCube, LatticeSignal, P_INF, lp_norm
from rieszlat.operators import (
    TGrid,
    convolve_direct,
    holder_fields,
    holder_pointwise_pair,
    hp_norm_estimate,
    j_gamma,
    kernel_lp_bound,
    max_relative_deviation,
    maximal,
    maximal_field,
    majorant_field,
    poisson_constant,
    poisson_maximal,
    riesz_direct,
    riesz_fft,
    riesz_kernel,
    separable_kernel,
    separable_majorant,
)


def _random_signal(n, radius, seed, nonnegative=False):
    rng = np.random.default_rng(seed)
    pts = DiscreteCube((0,) * n, radius).points()
    vals = rng.normal(size=pts.shape[0])
    if nonnegative:
        vals = np.abs(vals)
    return LatticeSignal.from_values(
        {tuple(int(c) for c in p): float(v) for p, v in zip(pts, vals)}
    )


# -- Riesz potential ----------------------------------------------------------


def test_riesz_direct_frozen_pair():
    # hand sum: 2^(-1/2) - 2 at j = 2 for b = delta_0 - 2 delta_1, alpha = 1/2
    b = LatticeSignal.from_values({(0,): 1.0, (1,): -2.0})
    out = DiscreteCube((2,), 0)
    got = riesz_direct(b, 0.5, out)((2,))
    assert got == pytest.approx(2.0**-0.5 - 2.0, rel=1e-15)


def test_riesz_direct_frozen_indicator():
    # I_1 of the 3x3 indicator in Z^2 at (5, 0), nine distances summed by hand
    b = LatticeSignal.indicator(DiscreteCube((0, 0), 1))
    got = riesz_direct(b, 1.0, DiscreteCube((5, 0), 0))((5, 0))
    assert got == pytest.approx(1.8227681616264153, rel=1e-14)


def test_riesz_kernel_skips_origin():
    # the i = j term is dropped, so I delta_0 vanishes at the origin
    d = LatticeSignal.delta((0, 0))
    out = DiscreteCube((0, 0), 1)
    field = riesz_direct(d, 1.0, out)
    assert field((0, 0)) == 0.0
    assert field((1, 0)) == 1.0
    kern = riesz_kernel(0.5, 1)
    assert kern(np.array([[[0]], [[2]]]))[0, 0] == 0.0


def test_riesz_fft_matches_direct():
    for n, radius in ((1, 12), (2, 4)):
        b = _random_signal(n, radius, seed=100 + n)
        out = DiscreteCube((1,) * n, radius + 3)
        direct = riesz_direct(b, 0.5 * n, out)
        fast = riesz_fft(b, 0.5 * n, out)
        assert max_relative_deviation(fast, direct, out) <= 1e-12


def test_riesz_fft_budget_overflow():
    b = _random_signal(1, 32, seed=5)
    with pytest.raises(MemoryError):
        riesz_fft(b, 0.5, DiscreteCube((0,), 32), max_elements=16)


def test_riesz_zero_signal():
    z = LatticeSignal.zero(2)
    out = DiscreteCube((0, 0), 2)
    assert riesz_fft(z, 1.0, out).is_zero
    assert riesz_direct(z, 1.0, out).is_zero


def test_riesz_rejects_alpha_out_of_range():
    b = LatticeSignal.delta((0,))
    with pytest.raises(ValueError):
        riesz_direct(b, 1.0, DiscreteCube((0,), 1))
    with pytest.raises(ValueError):
        riesz_direct(b, 0.0, DiscreteCube((0,), 1))


def test_riesz_translation_invariance():
    b = _random_signal(1, 6, seed=9)
    shift = (17,)
    out = DiscreteCube((0,), 8)
    out_shift = DiscreteCube(shift, 8)
    moved = riesz_direct(b.translated(shift), 0.5, out_shift)
    base = riesz_direct(b, 0.5, out)
    # identical difference vectors in identical order: float-exact match
    assert np.array_equal(
        moved.to_array(out_shift.lo, (out_shift.side,)),
        base.to_array(out.lo, (out.side,)),
    )


def test_riesz_exact_binary_homogeneity():
    b = _random_signal(2, 3, seed=11)
    out = DiscreteCube((0, 0), 4)
    twice = riesz_direct(b.scaled(2.0), 1.0, out)
    ref = riesz_direct(b, 1.0, out).scaled(2.0)
    assert twice == ref


def test_convolve_chunking_invariant():
    # different chunk sizes change the BLAS batching, not the result
    b = _random_signal(1, 10, seed=3)
    out = DiscreteCube((0,), 20)
    kern = riesz_kernel(0.5, 1)
    a = convolve_direct(b, kern, out, chunk=1)
    c = convolve_direct(b, kern, out, chunk=2048)
    assert max_relative_deviation(a, c, out) <= 1e-14


def test_max_relative_deviation_zero_reference():
    a = LatticeSignal.from_values({(0,): 0.25})
    z = LatticeSignal.zero(1)
    assert max_relative_deviation(a, z, DiscreteCube((0,), 1)) == 0.25


# -- regularized one-dimensional operator -------------------------------------


def test_j_gamma_delta_frozen():
    # max(1, |4|)^(gamma - 1) = 4^(-1/2)
    d = LatticeSignal.delta((0,))
    assert j_gamma(d, 0.5, DiscreteCube((4,), 0))((4,)) == 0.5


def test_j_gamma_identity_with_riesz():
    b = _random_signal(1, 8, seed=21)
    out = DiscreteCube((0,), 12)
    jg = j_gamma(b, 0.25, out)
    ig = riesz_direct(b, 0.25, out)
    assert max_relative_deviation(jg - ig, b, out) <= 1e-12


def test_j_gamma_domain_errors():
    b = LatticeSignal.delta((0, 0))
    with pytest.raises(ValueError):
        j_gamma(b, 0.5, DiscreteCube((0, 0), 1))
    d = LatticeSignal.delta((0,))
    for gamma in (0.0, 1.0):
        with pytest.raises(ValueError):
            j_gamma(d, gamma, DiscreteCube((0,), 1))


# -- kernel norm bound and separable majorant ---------------------------------


def test_kernel_lp_bound_certifies_window():
    # p' = 3, so the certified bound must dominate the window l^3 norm of the
    # kernel; the window sum is a lower bound of the full series
    bound = kernel_lp_bound(0.5, 1.5, 1)
    k = np.arange(1, 10_001, dtype=float)
    window = (2.0 * np.sum(k ** (-1.5))) ** (1.0 / 3.0)
    assert window <= bound


def test_kernel_lp_bound_rejects():
    with pytest.raises(ValueError):
        kernel_lp_bound(0.5, 1.0, 1)
    with pytest.raises(ValueError):
        kernel_lp_bound(0.5, 2.0, 1)  # p = n/alpha exactly


def test_separable_kernel_frozen():
    kern = separable_kernel(1.0, 2)
    got = kern(np.array([[3, 4]]))[0]
    assert got == pytest.approx(1.0 / math.sqrt(12.0), rel=1e-15)
    # coordinates below 1 are clamped
    assert kern(np.array([[0, 0]]))[0] == 1.0


def test_separable_majorant_dominates_riesz():
    b = _random_signal(2, 3, seed=31)
    out = DiscreteCube((0, 0), 6)
    field = riesz_direct(b, 1.0, out)
    maj = majorant_field(b, 1.0, out)
    for j in out.points():
        pt = tuple(int(c) for c in j)
        assert abs(field(pt)) <= maj(pt) * (1.0 + 1e-12)
    probe = (4, -2)
    assert separable_majorant(b, 1.0, probe) == pytest.approx(maj(probe), rel=1e-14)


# -- Poisson maximal ----------------------------------------------------------


def test_poisson_constant_one_dim():
    assert poisson_constant(1) == 1.0 / math.pi


def test_poisson_grid_covers_unit_scale():
    grid = TGrid.covering(4)
    assert 1.0 in grid.values()
    with pytest.raises(ValueError):
        TGrid(sigma=0, k_min=0, k_max=1)


def test_poisson_peak_at_delta():
    # t -> t/(t^2 + 1) peaks at t = 1, a grid point, so the maximal value at
    # |j| = 1 is exactly C_1 / 2
    d = LatticeSignal.delta((0,))
    field = poisson_maximal(d, DiscreteCube((0,), 2))
    assert field((1,)) == pytest.approx(poisson_constant(1) / 2.0, rel=1e-12)
    assert field((0,)) == 0.0  # kernel vanishes at the origin


def test_poisson_refinement_monotone():
    b = _random_signal(1, 4, seed=41)
    out = DiscreteCube((0,), 6)
    coarse = poisson_maximal(b, out, sigma=8)
    fine = poisson_maximal(b, out, sigma=16)
    for j in out.points():
        pt = (int(j[0]),)
        assert fine(pt) >= coarse(pt) - 1e-15


def test_hp_estimate_dominates_lp():
    b = _random_signal(1, 4, seed=43)
    out = DiscreteCube((0,), 8)
    assert hp_norm_estimate(b, 1.0, out) >= lp_norm(b, 1.0)


# -- fractional maximal -------------------------------------------------------


def test_maximal_frozen_two_masses():
    # masses 1 at 0 and 2 at 3, probed from j = 1: radius 2 cube wins, 3/5
    b = LatticeSignal.from_values({(0,): 1.0, (3,): 2.0})
    assert maximal(b, 0.0, (1,)) == pytest.approx(0.6, rel=1e-15)


def test_maximal_delta_closed_forms():
    d = LatticeSignal.delta((0,))
    for j in range(-30, 31):
        side = 2 * abs(j) + 1
        assert maximal(d, 0.0, (j,)) == 1.0 / float(side)
        assert maximal(d, 0.5, (j,)) == float(side) ** (-0.5)


def test_maximal_field_matches_pointwise():
    for n, radius in ((1, 10), (2, 4)):
        b = _random_signal(n, radius, seed=50 + n)
        out = DiscreteCube((1,) * n, radius + 2)
        field = maximal_field(b, 0.25 * n, out)
        for j in out.points():
            pt = tuple(int(c) for c in j)
            assert field(pt) == pytest.approx(maximal(b, 0.25 * n, pt), rel=1e-10)


def test_maximal_rejects_alpha():
    b = LatticeSignal.delta((0,))
    for alpha in (-0.5, 1.0):
        with pytest.raises(ValueError):
            maximal(b, alpha, (0,))
        with pytest.raises(ValueError):
            maximal_field(b, alpha, DiscreteCube((0,), 1))


def test_maximal_zero_signal():
    assert maximal(LatticeSignal.zero(1), 0.5, (3,)) == 0.0


def test_maximal_dominated_by_sup():
    b = _random_signal(1, 6, seed=61, nonnegative=True)
    sup = lp_norm(b, P_INF)
    for j in range(-8, 9):
        assert maximal(b, 0.0, (j,)) <= sup * (1.0 + 1e-12)


# -- Hoelder split ------------------------------------------------------------


def test_holder_split_holds_pointwise():
    b = _random_signal(1, 6, seed=71)
    out = DiscreteCube((0,), 10)
    lhs, rhs = holder_fields(b, 1.5, 0.5, out)
    for j in out.points():
        pt = (int(j[0]),)
        assert lhs(pt) <= rhs(pt) * (1.0 + 1e-9)
    pair = holder_pointwise_pair(b, 1.5, 0.5, (3,))
    assert pair == (lhs((3,)), rhs((3,)))


def test_holder_split_sharp_at_delta():
    d = LatticeSignal.delta((0,))
    for j in (0, 1, 5):
        lhs, rhs = holder_pointwise_pair(d, 1.0, 0.5, (j,))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_holder_fields_reject_bad_exponents():
    b = LatticeSignal.delta((0,))
    with pytest.raises(ValueError):
        holder_fields(b, 4.0, 0.9, DiscreteCube((0,), 1))
