"""Hardy-space atoms on Z^n and the polynomial machinery behind their decay.

An l^p atom (0 < p <= 1) supported on a cube Q = Q(k0, m) satisfies

    (a1)  supp a  is contained in  Q,
    (a2)  ||a||_inf <= (#Q)^(-1/p),
    (a3)  sum_j j^beta a(j) = 0 for every multi-index |beta| <= d_p,

with d_p = floor(n (1/p - 1)).  Subtracting the degree N-1 Taylor expansion
(N = d_p + 1) of x -> |x - j|^(alpha - n) around the cube center turns the
moment cancellation into a |j - k0|^(alpha - n - N) far field, which is what
the certified l^q tail bounds here quantify.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .lattice import DiscreteCube, LatticeSignal, Point, as_point, series_tail_bound

GENERATION_RETRIES = 16
MOMENT_RTOL = 1e-12
SUP_TOL = 1e-12


def dp_degree(p: float, n: int) -> int:
    """Moment-cancellation degree floor(n (1/p - 1)) for 0 < p <= 1.

    The product n(1/p - 1) is snapped to the nearest integer when it is within
    1e-9 of one, so decimal p values like 0.6 do not lose a whole degree to
    float rounding.
    """
    if not (0.0 < p <= 1.0):
        raise ValueError("atoms need 0 < p <= 1")
    if n < 1:
        raise ValueError("dimension must be >= 1")
    x = n * (1.0 / p - 1.0)
    nearest = round(x)
    if abs(x - nearest) <= 1e-9:
        x = nearest
    return int(math.floor(x))


def expansion_order(p: float, n: int) -> int:
    """Taylor order N = d_p + 1 used by the decay estimates."""
    return dp_degree(p, n) + 1


def multi_indices(n: int, max_degree: int) -> list[Point]:
    """All beta in N^n with |beta| <= max_degree, sorted lexicographically."""
    if max_degree < 0:
        return []
    out: list[Point] = []

    def rec(prefix: tuple[int, ...], budget: int):
        if len(prefix) == n:
            out.append(prefix)
            return
        for d in range(budget + 1):
            rec(prefix + (d,), budget - d)

    rec((), max_degree)
    return sorted(out)


def moment(b: LatticeSignal, beta: Iterable[int]) -> float:
    """Exact finite sum of j^beta b(j) over the support, with 0^0 = 1."""
    be = tuple(int(x) for x in beta)
    if len(be) != b.n or any(x < 0 for x in be):
        raise ValueError("beta must be a nonnegative multi-index of matching dimension")
    if b.is_zero:
        return 0.0
    pts = b.points().astype(float)
    w = np.ones(pts.shape[0])
    for l, e in enumerate(be):
        if e:
            w = w * pts[:, l] ** e
    return float(np.sum(w * b.values_array()))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the atom conditions, with one entry per violated check."""

    ok: bool
    violations: tuple[str, ...]
    sup_value: float
    sup_bound: float
    moment_residues: dict[Point, float] = field(default_factory=dict, compare=False)


def validate_atom(candidate: LatticeSignal, cube: DiscreteCube, p: float) -> ValidationReport:
    """Check (a1)-(a3) for `candidate` against the cube and exponent.

    Moment residues are compared against 1e-12 * (#Q)^(1 - 1/p) * m^|beta|,
    the roundoff scale of the defining sums.
    """
    d = dp_degree(p, cube.n)
    violations: list[str] = []
    if candidate.n != cube.n:
        raise ValueError("dimension mismatch")

    for pt in map(tuple, candidate.points()):
        if not cube.contains(pt):
            violations.append(f"support point {pt} outside the cube")
            break

    sup = max((abs(v) for _, v in candidate.items()), default=0.0)
    sup_bound = cube.cardinality ** (-1.0 / p)
    if sup > sup_bound + SUP_TOL:
        violations.append(f"sup {sup:.6g} exceeds (#Q)^(-1/p) = {sup_bound:.6g}")

    residues: dict[Point, float] = {}
    card_scale = cube.cardinality ** (1.0 - 1.0 / p)
    for beta in multi_indices(cube.n, d):
        res = moment(candidate, beta)
        residues[beta] = res
        tol = MOMENT_RTOL * card_scale * float(max(cube.radius, 0)) ** sum(beta) if sum(beta) else MOMENT_RTOL * card_scale
        if abs(res) > tol:
            violations.append(f"moment beta={beta} residue {res:.3e} above {tol:.3e}")

    return ValidationReport(
        ok=not violations,
        violations=tuple(violations),
        sup_value=sup,
        sup_bound=sup_bound,
        moment_residues=residues,
    )


@dataclass(frozen=True)
class Atom:
    """Validated atom: the signal, its cube, and the exponent bookkeeping."""

    signal: LatticeSignal
    cube: DiscreteCube
    p: float
    d_p: int

    @property
    def N(self) -> int:
        return self.d_p + 1

    @property
    def n(self) -> int:
        return self.cube.n


def _centered_monomials(cube: DiscreteCube, degree: int) -> np.ndarray:
    pts = (cube.points() - np.asarray(cube.center)).astype(float)
    cols = []
    for beta in multi_indices(cube.n, degree):
        col = np.ones(pts.shape[0])
        for l, e in enumerate(beta):
            if e:
                col = col * pts[:, l] ** e
        cols.append(col)
    return np.stack(cols, axis=1)


def _orthonormalize(mat: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with a second pass; columns must be independent."""
    q = mat.astype(float).copy()
    rows, cols = q.shape
    for j in range(cols):
        for _ in range(2):
            for i in range(j):
                q[:, j] -= np.dot(q[:, i], q[:, j]) * q[:, i]
        norm = np.linalg.norm(q[:, j])
        if norm < 1e-10 * math.sqrt(rows):
            raise ValueError("monomial family is numerically rank deficient on this cube")
        q[:, j] /= norm
    return q


def generate_atom(cube: DiscreteCube, p: float, seed: int) -> Atom:
    """Draw a random atom on `cube`: a uniform [-1, 1] sample with all centered
    monomials of degree <= d_p projected out, rescaled to saturate (a2).

    The projection uses modified Gram-Schmidt against the counting-measure
    inner product.  If a draw is annihilated by the projection the seed is
    incremented and the draw repeated, up to 16 attempts.
    """
    n = cube.n
    d = dp_degree(p, n)
    if cube.radius < 1:
        raise ValueError("no nonzero mean-free signal fits on a single point")
    basis_dim = len(multi_indices(n, d))
    if basis_dim >= cube.cardinality:
        raise ValueError("the monomial family fills the whole cube; enlarge it")

    basis = _orthonormalize(_centered_monomials(cube, d))
    for attempt in range(GENERATION_RETRIES):
        rng = np.random.Generator(np.random.PCG64(seed + attempt))
        draw = rng.uniform(-1.0, 1.0, cube.cardinality)
        v = draw - basis @ (basis.T @ draw)
        v = v - basis @ (basis.T @ v)  # second pass drives residues to roundoff
        peak = float(np.max(np.abs(v)))
        if peak > 1e-12:
            a = v * (cube.cardinality ** (-1.0 / p) / peak)
            signal = LatticeSignal.from_array(a.reshape([cube.side] * n), cube.lo)
            report = validate_atom(signal, cube, p)
            if report.ok:
                return Atom(signal=signal, cube=cube, p=p, d_p=d)
    raise ValueError(f"no usable draw after {GENERATION_RETRIES} attempts from seed {seed}")


def synthesize(atoms: Sequence[Atom], lambdas: Sequence[float]) -> LatticeSignal:
    """Finite combination sum_k lambda_k a_k as one signal."""
    if len(atoms) != len(lambdas):
        raise ValueError("one coefficient per atom")
    if not atoms:
        raise ValueError("need at least one atom")
    n = atoms[0].n
    out = LatticeSignal.zero(n)
    for a, lam in zip(atoms, lambdas):
        out = out + a.signal.scaled(float(lam))
    return out


def scalar_p_sum(lambdas: Sequence[float], p: float) -> float:
    """sum_k |lambda_k|^p, the decomposition size at exponent p."""
    if p <= 0:
        raise ValueError("p must be positive")
    return float(np.sum(np.abs(np.asarray(lambdas, dtype=float)) ** p))


# -- symbolic derivatives of x -> |x - pole|^s ------------------------------
#
# Every derivative is a finite combination of terms c * u^gamma * r^t with
# u = x - pole and r = |u|; differentiation acts by
#     d/dx_l [c u^gamma r^t] = c gamma_l u^(gamma - e_l) r^t
#                              + c t u^(gamma + e_l) r^(t - 2),
# and each term of an order-k derivative has |gamma| + t = s - k, so the
# coefficient sum bounds |D^beta f| by (sum |c|) r^(s - k).

TermFamily = dict[tuple[Point, float], float]


def _differentiate(family: TermFamily, axis: int, n: int) -> TermFamily:
    out: TermFamily = {}
    for (gamma, t), c in family.items():
        if gamma[axis] > 0:
            key = (tuple(g - (1 if l == axis else 0) for l, g in enumerate(gamma)), t)
            out[key] = out.get(key, 0.0) + c * gamma[axis]
        if c * t != 0.0:
            key = (tuple(g + (1 if l == axis else 0) for l, g in enumerate(gamma)), t - 2.0)
            out[key] = out.get(key, 0.0) + c * t
    return {k: v for k, v in out.items() if v != 0.0}


@lru_cache(maxsize=None)
def _derivative_families(s: float, n: int, order: int) -> dict[Point, TermFamily]:
    zero_gamma: Point = (0,) * n
    fams: dict[Point, TermFamily] = {zero_gamma: {(zero_gamma, float(s)): 1.0}}
    for beta in multi_indices(n, order):
        if beta in fams:
            continue
        axis = next(l for l, e in enumerate(beta) if e > 0)
        parent = tuple(e - (1 if l == axis else 0) for l, e in enumerate(beta))
        fams[beta] = _differentiate(fams[parent], axis, n)
    return fams


def coefficient_abs_sum(alpha: float, n: int, order: int) -> float:
    """A_k = max over |beta| = k of the term-coefficient l^1 mass of D^beta f."""
    fams = _derivative_families(alpha - n, n, order)
    worst = 0.0
    for beta, fam in fams.items():
        if sum(beta) == order:
            worst = max(worst, sum(abs(c) for c in fam.values()))
    return worst


def remainder_constant(alpha: float, n: int, N: int) -> float:
    """Explicit K(N, alpha, n) = A_N n^N / N! * 2^(N + n - alpha).

    For a cube of radius m and a point j outside the 4*floor(sqrt(n))-dilated
    cube, the degree N-1 expansion of |x - j|^(alpha - n) around the center
    satisfies  |f(i) - q_N(i, j)| <= K (sqrt(n) m)^N |j - k0|^(alpha - n - N)
    at every i in the cube: the Lagrange point xi keeps |j - xi| >= |j - k0|/2.
    """
    if N < 1:
        raise ValueError("the expansion order must be >= 1")
    a_n = coefficient_abs_sum(alpha, n, N)
    return a_n * float(n) ** N / math.factorial(N) * 2.0 ** (N + n - alpha)


@dataclass(frozen=True)
class TaylorExpansion:
    """Degree N-1 expansion of x -> |x - pole|^(alpha - n) around `center`."""

    center: Point
    pole: Point
    alpha: float
    n: int
    order: int

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "pole", as_point(self.pole))
        if len(self.center) != self.n or len(self.pole) != self.n:
            raise ValueError("dimension mismatch")
        if not (0.0 < self.alpha < self.n):
            raise ValueError("alpha must lie in (0, n)")
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.center == self.pole:
            raise ValueError("the expansion point must differ from the pole")

    @property
    def s(self) -> float:
        return self.alpha - self.n

    def _eval_family(self, beta: Point) -> float:
        fam = _derivative_families(self.s, self.n, self.order)[beta]
        u = np.asarray(self.center, dtype=float) - np.asarray(self.pole, dtype=float)
        r2 = float(np.dot(u, u))
        total = 0.0
        for (gamma, t), c in sorted(fam.items()):
            total += c * math.prod(float(ui) ** g for ui, g in zip(u, gamma) if g) * r2 ** (0.5 * t)
        return total

    def derivative_value(self, beta: Iterable[int]) -> float:
        """D^beta f evaluated at the expansion center."""
        be = tuple(int(x) for x in beta)
        if sum(be) > self.order:
            raise ValueError("derivative order exceeds the expansion order")
        return self._eval_family(be)

    def polynomial(self, i: Iterable[int]) -> float:
        """q_N(i) = sum over |beta| <= N-1 of D^beta f(center) (i - center)^beta / beta!."""
        pt = as_point(i)
        dx = [a - c for a, c in zip(pt, self.center)]
        total = 0.0
        for beta in multi_indices(self.n, self.order - 1):
            coeff = self._eval_family(beta) / math.prod(math.factorial(e) for e in beta)
            total += coeff * math.prod(float(d) ** e for d, e in zip(dx, beta) if e)
        return total

    def exact(self, i: Iterable[int]) -> float:
        pt = np.asarray(as_point(i), dtype=float) - np.asarray(self.pole, dtype=float)
        return float(np.dot(pt, pt)) ** (0.5 * self.s)

    def remainder_constant(self) -> float:
        return remainder_constant(self.alpha, self.n, self.order)


def taylor_polynomial(expansion: TaylorExpansion, i: Iterable[int]) -> float:
    return expansion.polynomial(i)


def remainder_bound(expansion: TaylorExpansion, cube: DiscreteCube) -> float:
    """The constant K such that |f - q_N| <= K (sqrt(n) m)^N |pole - k0|^(alpha-n-N)
    on the cube; requires the pole to sit outside the 4*floor(sqrt(n)) dilation."""
    if cube.center != expansion.center:
        raise ValueError("the expansion must be centered on the cube")
    guard = cube.dilate(4 * math.isqrt(cube.n))
    if guard.contains(expansion.pole):
        raise ValueError("the pole must lie outside the dilated cube")
    return expansion.remainder_constant()


def remainder_envelope(expansion: TaylorExpansion, cube: DiscreteCube) -> float:
    """Full remainder envelope K (sqrt(n) m)^N |pole - k0|^(alpha - n - N)."""
    k = remainder_bound(expansion, cube)
    n, N = expansion.n, expansion.order
    u = np.asarray(expansion.pole, dtype=float) - np.asarray(expansion.center, dtype=float)
    dist = math.sqrt(float(np.dot(u, u)))
    return k * (math.sqrt(n) * cube.radius) ** N * dist ** (expansion.alpha - n - N)


def lattice_tail_sum_bound(n: int, eps: float, start_radius: int) -> float:
    """Certified upper bound for sum over |v|_inf > R of |v|^(-(n + eps)).

    Two rigorous routes are evaluated and the smaller taken: a Chebyshev-shell
    count (at most 2n (2r+1)^(n-1) points per shell, |v| >= r) with an integral
    tail, and a rescaling that maps side-R blocks onto the full-series bound:
    v in Rw + (-R/2, R/2]^n forces |v| >= R |w| / (1 + sqrt(n)/2) and each
    block holds R^n points.  Both routes scale like R^(-eps), so doubling R
    divides the bound by exactly 2^eps.
    """
    if eps <= 0:
        raise ValueError("the tail series diverges for eps <= 0")
    if start_radius < 1:
        raise ValueError("the tail must start at radius >= 1")
    r = float(start_radius)
    shell = 2.0 * n * 3.0 ** (n - 1) * r ** (-eps) / eps
    block = (1.0 + math.sqrt(n) / 2.0) ** (n + eps) * series_tail_bound(n, eps) * r ** (-eps)
    return min(shell, block)


def tail_exponent_excess(n: int, N: int, alpha: float, q: float) -> float:
    """eps = q (n + N - alpha) - n; positive exactly when the far field of an
    order-N cancellation is l^q summable."""
    return q * (n + N - alpha) - n


def atom_tail_lq_bound(atom: Atom, alpha: float, q: float, start_radius: int) -> float:
    """Rigorous upper bound for the l^q mass of I_alpha a outside the box
    {|j - k0|_inf <= R}.

    Combines the Taylor remainder envelope (using the moment cancellation up
    to order N - 1 = d_p) with the lattice tail sum at exponent excess
    eps = q (n + N - alpha) - n > 0.  Requires R >= 4 floor(sqrt(n)) m + 1 so
    the whole tail lies in the remainder regime.
    """
    return moment_aware_tail_bound(atom, alpha, q, start_radius, atom.N)


def moment_aware_tail_bound(
    atom: Atom, alpha: float, q: float, start_radius: int, order: int
) -> float:
    """Tail bound as `atom_tail_lq_bound` but with an explicit cancellation
    order; order 0 means no moment cancellation is used at all.  Raises
    ValueError when the resulting tail series diverges (eps <= 0)."""
    n, m = atom.n, atom.cube.radius
    if not (0.0 < alpha < n):
        raise ValueError("alpha must lie in (0, n)")
    if q <= 0:
        raise ValueError("q must be positive")
    if start_radius < 4 * math.isqrt(n) * m + 1:
        raise ValueError("the tail must start beyond the dilated cube")
    eps = tail_exponent_excess(n, order, alpha, q)
    if eps <= 0:
        raise ValueError("tail series diverges: q (n + N - alpha) <= n")
    card = atom.cube.cardinality
    side = atom.cube.side
    if order == 0:
        # no cancellation: |I_alpha a(j)| <= ||a||_1 sup_{i in Q} |i-j|^(alpha-n)
        envelope = card ** (1.0 - 1.0 / atom.p) * 2.0 ** (n - alpha)
    else:
        k_const = remainder_constant(alpha, n, order)
        envelope = (
            card ** (1.0 - 1.0 / atom.p)
            * k_const
            * (math.sqrt(n) * side / 2.0) ** order
        )
    return envelope * lattice_tail_sum_bound(n, eps, start_radius) ** (1.0 / q)
