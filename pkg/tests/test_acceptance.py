"""Acceptance gate: the twelve numbered criteria, each printing one verdict line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion lines;
every criterion uses the default sweep configuration and its stated tolerance.
The expensive suites run once per module and are shared between criteria.
"""
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from rieszlat.atoms import TaylorExpansion, remainder_bound
from rieszlat.lattice import DiscreteCube, LatticeSignal
from rieszlat.operators import maximal
from rieszlat.report import write_rows
from rieszlat.verify import (
    FAIL,
    PASS,
    SweepConfig,
    atom_uniform_sweep,
    atom_validity_sweep,
    inequality_suite,
    riesz_exactness,
    weak_type_record,
)

CFG = SweepConfig()


def _verdict(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num:02d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num:02d} failed: {detail}"


def _of(rows, experiment):
    return [r for r in rows if r.experiment == experiment]


@pytest.fixture(scope="module")
def riesz_rows():
    return riesz_exactness(CFG)


@pytest.fixture(scope="module")
def ineq_rows():
    return inequality_suite(CFG)


@pytest.fixture(scope="module")
def validity_rows():
    return atom_validity_sweep(CFG)


@pytest.fixture(scope="module")
def atom_sweep():
    start = time.monotonic()
    rows = atom_uniform_sweep(replace(CFG, negative_controls=True))
    return rows, time.monotonic() - start


@pytest.fixture(scope="module")
def weak_rows():
    return weak_type_record(CFG)


def test_criterion_01_regularized_identity(riesz_rows):
    rows = _of(riesz_rows, "jgamma_identity")
    worst = max(r.value for r in rows)
    ok = len(rows) == 3 and all(r.verdict == PASS for r in rows) and worst <= 1e-12
    _verdict(
        1,
        ok,
        f"max relative deviation of (J - I)b from b is {worst:.2e} "
        f"over 100 signals x 3 exponents (tol 1e-12)",
    )


def test_criterion_02_fft_equals_direct(riesz_rows):
    rows = _of(riesz_rows, "riesz_fft_agreement")
    dims = sorted(r.n for r in rows)
    worst = max(r.value for r in rows)
    ok = dims == [1, 2, 3] and all(r.verdict == PASS for r in rows) and worst <= 1e-9
    _verdict(
        2,
        ok,
        f"fft vs direct max relative deviation {worst:.2e} "
        f"for n = 1, 2, 3 (tol 1e-9)",
    )


def test_criterion_03_series_bound_and_bracket(ineq_rows):
    bound_rows = _of(ineq_rows, "series_partial_vs_bound")
    bracket = _of(ineq_rows, "series_one_dim_bracket")
    grid_ok = {(r.n, r.alpha) for r in bound_rows} == {
        (n, e) for n in (1, 2, 3) for e in (0.5, 1.0, 2.0)
    }
    ok = (
        grid_ok
        and all(r.verdict == PASS for r in bound_rows)
        and len(bracket) == 1
        and bracket[0].verdict == PASS
    )
    mid = bracket[0].value
    target = math.pi**2 / 3.0
    _verdict(
        3,
        ok,
        f"partial sums below the closed bound on the 3 x 3 grid; "
        f"one-dim bracket midpoint {mid:.6f} vs {target:.6f} "
        f"({abs(mid - target) / target:.2%} off, tol 1%)",
    )


def test_criterion_04_pointwise_inequalities(ineq_rows):
    coord = _of(ineq_rows, "coordinate_sum_inequality")
    prod = _of(ineq_rows, "product_lower_bound")
    dims_ok = {r.n for r in coord} == {1, 2, 3}
    eps_ok = {r.alpha for r in prod} == {0.0, 0.5, 1.0, 2.0}
    ok = dims_ok and eps_ok and all(r.verdict == PASS for r in coord + prod)
    worst = max(r.value for r in coord + prod)
    _verdict(
        4,
        ok,
        f"exhaustive box radius 20, n = 1..3, four epsilon values; "
        f"worst margin {worst:.2e} (must be <= 1e-9)",
    )


def test_criterion_05_holder_split(ineq_rows):
    rows = _of(ineq_rows, "holder_pointwise")
    worst = max(r.value for r in rows)
    ok = bool(rows) and all(r.verdict == PASS for r in rows) and worst <= 1.0 + 1e-9
    _verdict(
        5,
        ok,
        f"pointwise split holds for 50 signals per grid point; "
        f"worst lhs/rhs ratio {worst:.12f} (cap 1 + 1e-9)",
    )


def test_criterion_06_majorant_and_kernel_bound(ineq_rows):
    maj = _of(ineq_rows, "separable_majorant")
    dom = _of(ineq_rows, "kernel_lp_domination")
    ok = bool(maj) and bool(dom) and all(r.verdict == PASS for r in maj + dom)
    _verdict(
        6,
        ok,
        f"separable majorant dominates on {len(maj)} grid cells and the "
        f"certified kernel bound holds on {len(dom)} cells",
    )


def test_criterion_07_atom_validity(validity_rows):
    ok = len(validity_rows) >= 200 and all(r.verdict == PASS for r in validity_rows)
    _verdict(
        7,
        ok,
        f"{len(validity_rows)} generated atoms across n, p, m all satisfy "
        f"support, sup-norm and moment constraints",
    )


def test_criterion_08_uniform_atom_bound(atom_sweep):
    rows, elapsed = atom_sweep
    slope_rows = _of(rows, "atom_uniform_slope")
    slopes = [r.value for r in slope_rows]
    spreads = [r.tail for r in slope_rows]
    # growth gate: the certified totals may decay with m (the lattice kernel
    # correction shrinks them) but must not grow or spread
    ok = (
        len(slope_rows) == 8
        and all(r.verdict == PASS for r in slope_rows)
        and max(slopes) <= 0.05
        and max(spreads) <= 4.0
        and elapsed <= 900.0
    )
    _verdict(
        8,
        ok,
        f"slopes in [{min(slopes):+.3f}, {max(slopes):+.3f}] (gate +0.05), "
        f"max/min spread <= {max(spreads):.2f} (gate 4), "
        f"8 seeds x m in 1..16, {elapsed:.0f}s of 900s budget",
    )


def test_criterion_09_broken_moment_control(atom_sweep):
    rows, _ = atom_sweep
    control = _of(rows, "atom_uniform_control_slope")
    ok = (
        len(control) == 4  # every p = 1 grid point
        and all(r.verdict == FAIL for r in control)
        and all(r.value >= 0.3 for r in control)
    )
    _verdict(
        9,
        ok,
        f"all {len(control)} moment-broken controls diverge "
        f"(certified tails are infinite, slope gate reports fail)",
    )


def test_criterion_10_taylor_remainder():
    rng = np.random.default_rng(20260815)
    checks = 0
    worst = 0.0
    fd_worst = 0.0
    for alpha in (0.25, 0.5):
        for order in (1, 2, 3):
            for m in (1, 2, 4):
                cube = DiscreteCube((0,), m)
                for _ in range(50):
                    mag = int(rng.integers(4 * m + 1, 4 * m + 300))
                    j = mag if rng.integers(2) else -mag
                    exp = TaylorExpansion(
                        center=(0,), pole=(j,), alpha=alpha, n=1, order=order
                    )
                    k = remainder_bound(exp, cube)
                    env = k * float(m) ** order * abs(j) ** (alpha - 1.0 - order)
                    for i in cube.points():
                        pt = (int(i[0]),)
                        err = abs(exp.exact(pt) - exp.polynomial(pt))
                        assert env > 0
                        worst = max(worst, err / env)
                        checks += 1
                    # first-order coefficient against a central difference
                    h = 1e-5
                    fd = (
                        abs(j - h) ** (alpha - 1.0) - abs(j + h) ** (alpha - 1.0)
                    ) / (2.0 * h)
                    rel = abs(exp.derivative_value((1,)) - fd) / abs(fd)
                    fd_worst = max(fd_worst, rel)
    ok = worst <= 1.0 and fd_worst <= 1e-6
    _verdict(
        10,
        ok,
        f"{checks} remainder evaluations all inside the envelope "
        f"(worst fill {worst:.3f}); first-order coefficients match central "
        f"differences to {fd_worst:.2e} (tol 1e-6)",
    )


def test_criterion_11_maximal_closed_forms(weak_rows):
    d = LatticeSignal.delta((0,))
    exact = 0
    for j in range(-100, 101):
        side = float(2 * abs(j) + 1)
        if maximal(d, 0.0, (j,)) == 1.0 / side and maximal(d, 0.5, (j,)) == side**-0.5:
            exact += 1
    weak = _of(weak_rows, "weak_type")
    per_n = {n: len({r.seed for r in weak if r.n == n}) for n in (1, 2)}
    ok = (
        exact == 201
        and per_n == {1: 100, 2: 100}
        and all(r.verdict == PASS for r in weak)
    )
    _verdict(
        11,
        ok,
        f"delta closed forms exact at all 201 probes; weak-type bound holds "
        f"for 100 signals x 9 levels in each dimension",
    )


def test_criterion_12_byte_identical_rerun(ineq_rows, weak_rows, tmp_path):
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    write_rows(ineq_rows + weak_rows, first)
    write_rows(inequality_suite(CFG) + weak_type_record(CFG), second)
    ok = first.read_bytes() == second.read_bytes()
    _verdict(
        12,
        ok,
        f"rerunning two suites reproduced {first.stat().st_size} bytes of "
        f"rows.csv exactly",
    )
