"""Lattice-side primitives on Z^n.

Points are plain integer tuples; point sets are (M, n) int arrays.  The module
provides discrete cubes, finite-support signals with a sparse map plus a dense
array view, exponent bookkeeping for the Sobolev pairing 1/q = 1/p - alpha/n,
l^p quasi-norms, quadratic/circular partial sums, a certified upper bound for
the lattice series sum |k|^(-(n+eps)), and the two elementary coordinate
inequalities used all over the operator estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping

import numpy as np

Point = tuple[int, ...]

#: distinguished value for p = infinity in exponent grids
P_INF = math.inf

# relative tolerance for checks that are equalities in exact arithmetic
EQ_RTOL = 1e-12
# multiplicative slack for inequality assertions, applied to the comparison scale
INEQ_SLACK = 1e-9


def as_point(k: Iterable[int]) -> Point:
    pt = tuple(int(c) for c in k)
    if not pt:
        raise ValueError("points must have dimension >= 1")
    return pt


def norm_1(k: Iterable[int]) -> float:
    return float(sum(abs(c) for c in as_point(k)))


def norm_2(k: Iterable[int]) -> float:
    return math.sqrt(sum(c * c for c in as_point(k)))


def norm_inf(k: Iterable[int]) -> int:
    return max(abs(c) for c in as_point(k))


def grid_points(lo: Iterable[int], hi: Iterable[int]) -> np.ndarray:
    """All lattice points of the box prod_l [lo_l, hi_l], lexicographic, (M, n)."""
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    if lo.shape != hi.shape or lo.ndim != 1:
        raise ValueError("lo and hi must be integer vectors of equal length")
    if np.any(hi < lo):
        return np.empty((0, lo.size), dtype=np.int64)
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class DiscreteCube:
    """Cube Q(center, radius) = {j : |j - center|_inf <= radius} in Z^n."""

    center: Point
    radius: int

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "radius", int(self.radius))
        if self.radius < 0:
            raise ValueError("cube radius must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    @property
    def cardinality(self) -> int:
        return self.side ** self.n

    @property
    def lo(self) -> Point:
        return tuple(c - self.radius for c in self.center)

    @property
    def hi(self) -> Point:
        return tuple(c + self.radius for c in self.center)

    def contains(self, point: Iterable[int]) -> bool:
        pt = as_point(point)
        if len(pt) != self.n:
            raise ValueError("dimension mismatch")
        return all(abs(a - c) <= self.radius for a, c in zip(pt, self.center))

    def dilate(self, factor: int) -> "DiscreteCube":
        """Concentric cube with radius scaled by a nonnegative integer factor."""
        factor = int(factor)
        if factor < 0:
            raise ValueError("dilation factor must be nonnegative")
        return DiscreteCube(self.center, factor * self.radius)

    def points(self) -> np.ndarray:
        return grid_points(self.lo, self.hi)


def covering_cube(points: np.ndarray, center: Iterable[int] | None = None) -> DiscreteCube:
    """Smallest cube around `center` (default: rounded bounding-box midpoint)
    containing every row of `points`."""
    pts = np.asarray(points, dtype=np.int64)
    if pts.size == 0:
        raise ValueError("cannot cover an empty point set")
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    if center is None:
        center = tuple(int(c) for c in np.floor((lo + hi) / 2 + 0.5))
    center = as_point(center)
    radius = int(np.max(np.abs(pts - np.asarray(center)))) if pts.size else 0
    return DiscreteCube(center, radius)


class LatticeSignal:
    """Finitely supported real-valued signal on Z^n.

    Canonical storage is a point -> value map holding the nonzero values only;
    a dense array view over any covering box is available for convolution.
    Instances are treated as immutable: all arithmetic returns new signals.
    """

    __slots__ = ("n", "_values", "_points", "_array")

    def __init__(self, n: int, values: Mapping[Point, float]):
        self.n = int(n)
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        cleaned: dict[Point, float] = {}
        for k in sorted(values):
            pt = as_point(k)
            if len(pt) != self.n:
                raise ValueError("point dimension mismatch")
            v = float(values[k])
            if v != 0.0:
                cleaned[pt] = v
        self._values = cleaned
        self._points: np.ndarray | None = None
        self._array: np.ndarray | None = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_values(cls, values: Mapping[Point, float], n: int | None = None) -> "LatticeSignal":
        if n is None:
            try:
                n = len(next(iter(values)))
            except StopIteration:
                raise ValueError("dimension needed for an empty signal") from None
        return cls(n, values)

    @classmethod
    def zero(cls, n: int) -> "LatticeSignal":
        return cls(n, {})

    @classmethod
    def delta(cls, point: Iterable[int]) -> "LatticeSignal":
        pt = as_point(point)
        return cls(len(pt), {pt: 1.0})

    @classmethod
    def indicator(cls, cube: DiscreteCube) -> "LatticeSignal":
        pts = cube.points()
        return cls.from_array(np.ones(tuple([cube.side] * cube.n)), cube.lo)

    @classmethod
    def from_array(cls, array: np.ndarray, lo: Iterable[int]) -> "LatticeSignal":
        arr = np.asarray(array, dtype=float)
        lo = as_point(lo)
        if arr.ndim != len(lo):
            raise ValueError("array rank must match the anchor dimension")
        vals: dict[Point, float] = {}
        for idx in np.argwhere(arr != 0.0):
            vals[tuple(int(i + o) for i, o in zip(idx, lo))] = float(arr[tuple(idx)])
        return cls(len(lo), vals)

    # -- basic queries ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._values

    @property
    def support_size(self) -> int:
        return len(self._values)

    @property
    def support_box(self) -> DiscreteCube:
        if self.is_zero:
            return DiscreteCube((0,) * self.n, 0)
        return covering_cube(self.points())

    def __call__(self, point: Iterable[int]) -> float:
        return self._values.get(as_point(point), 0.0)

    def items(self):
        return self._values.items()

    def points(self) -> np.ndarray:
        if self._points is None:
            if self.is_zero:
                self._points = np.empty((0, self.n), dtype=np.int64)
            else:
                self._points = np.array(list(self._values), dtype=np.int64)
        return self._points

    def values_array(self) -> np.ndarray:
        if self._array is None:
            self._array = np.array(list(self._values.values()), dtype=float)
        return self._array

    def to_array(self, lo: Iterable[int], shape: Iterable[int]) -> np.ndarray:
        """Dense view anchored at `lo`; support outside the box is an error."""
        lo = np.asarray(as_point(lo))
        shape = tuple(int(s) for s in shape)
        out = np.zeros(shape)
        if self.is_zero:
            return out
        idx = self.points() - lo
        if np.any(idx < 0) or np.any(idx >= np.asarray(shape)):
            raise ValueError("support sticks out of the requested box")
        out[tuple(idx.T)] = self.values_array()
        return out

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Tight dense view: (array over the bounding box, lower corner)."""
        if self.is_zero:
            return np.zeros((1,) * self.n), np.zeros(self.n, dtype=np.int64)
        pts = self.points()
        lo = pts.min(axis=0)
        shape = tuple(int(s) for s in pts.max(axis=0) - lo + 1)
        return self.to_array(lo, shape), lo

    # -- arithmetic ---------------------------------------------------------

    def scaled(self, c: float) -> "LatticeSignal":
        return LatticeSignal(self.n, {k: c * v for k, v in self._values.items()})

    def __add__(self, other: "LatticeSignal") -> "LatticeSignal":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        out = dict(self._values)
        for k, v in other._values.items():
            out[k] = out.get(k, 0.0) + v
        return LatticeSignal(self.n, out)

    def __sub__(self, other: "LatticeSignal") -> "LatticeSignal":
        return self + other.scaled(-1.0)

    def abs(self) -> "LatticeSignal":
        return LatticeSignal(self.n, {k: abs(v) for k, v in self._values.items()})

    def abs_powered(self, r: float) -> "LatticeSignal":
        """Pointwise |b|^r on the support."""
        if r <= 0:
            raise ValueError("exponent must be positive")
        return LatticeSignal(self.n, {k: abs(v) ** r for k, v in self._values.items()})

    def translated(self, shift: Iterable[int]) -> "LatticeSignal":
        sh = as_point(shift)
        if len(sh) != self.n:
            raise ValueError("dimension mismatch")
        return LatticeSignal(
            self.n,
            {tuple(a + b for a, b in zip(k, sh)): v for k, v in self._values.items()},
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeSignal) and self.n == other.n and self._values == other._values

    def __hash__(self):  # pragma: no cover - signals are not meant as dict keys
        return hash((self.n, tuple(self._values.items())))

    def __repr__(self):
        return f"LatticeSignal(n={self.n}, support={self.support_size})"


@dataclass(frozen=True)
class Exponents:
    """Exponent quadruple (p, q, alpha, n) tied by 1/q = 1/p - alpha/n."""

    p: float
    q: float
    alpha: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if not (0.0 < self.alpha < self.n):
            raise ValueError("alpha must lie in (0, n)")
        if self.p <= 0:
            raise ValueError("p must be positive")
        if self.q <= 0:
            raise ValueError("q must be positive; this requires alpha/n < 1/p")
        lhs = 1.0 / self.q
        rhs = 1.0 / self.p - self.alpha / self.n
        if abs(lhs - rhs) > EQ_RTOL * max(1.0, abs(lhs), abs(rhs)):
            raise ValueError("exponents violate 1/q = 1/p - alpha/n")

    @classmethod
    def from_p_alpha(cls, p: float, alpha: float, n: int) -> "Exponents":
        inv_q = 1.0 / p - alpha / n
        if inv_q <= 0:
            raise ValueError("alpha/n must be smaller than 1/p")
        return cls(p=p, q=1.0 / inv_q, alpha=alpha, n=n)


def lp_norm(b: LatticeSignal, p: float) -> float:
    """l^p quasi-norm of a finite-support signal; p = math.inf gives the sup."""
    if p == P_INF:
        return float(np.max(np.abs(b.values_array()))) if not b.is_zero else 0.0
    if p <= 0:
        raise ValueError("p must be positive")
    if b.is_zero:
        return 0.0
    return float(np.sum(np.abs(b.values_array()) ** p) ** (1.0 / p))


def partial_sum(
    term: Callable[[np.ndarray], np.ndarray],
    n: int,
    N: int,
    mode: str = "quadratic",
) -> float:
    """Partial sum of `term` over a lattice ball of radius N.

    `term` must accept an (M, n) integer array and return (M,) values; it is
    evaluated on every point of the ball, including the origin.  `quadratic`
    uses the l^inf ball (a box), `circular` the Euclidean ball.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    pts = grid_points([-N] * n, [N] * n)
    if mode == "circular":
        pts = pts[np.sum(pts.astype(float) ** 2, axis=1) <= float(N) ** 2]
    elif mode != "quadratic":
        raise ValueError("mode must be 'quadratic' or 'circular'")
    vals = np.asarray(term(pts), dtype=float)
    if vals.shape != (pts.shape[0],):
        raise ValueError("term must return one value per point")
    return float(np.sum(vals))


def power_law_term(s: float) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized k -> |k|^(-s) with the value 0 at the origin."""

    def term(pts: np.ndarray) -> np.ndarray:
        d2 = np.sum(pts.astype(float) ** 2, axis=1)
        out = np.zeros(pts.shape[0])
        nz = d2 > 0
        out[nz] = d2[nz] ** (-0.5 * s)
        return out

    return term


@lru_cache(maxsize=None)
def series_tail_bound(n: int, epsilon: float, terms: int = 10**6) -> float:
    """Upper bound B(n, eps) for every partial sum of sum_{k != 0} |k|^(-(n+eps)).

    The bound is 2^n * n^(n+eps) * (1 + zeta_upper(1 + eps/n))^n where the
    one-dimensional series is evaluated by partial sum up to `terms` plus the
    integral-comparison tail terms^(-eps/n) * (n/eps), so the result stays a
    genuine upper bound for the full series.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive: the series diverges otherwise")
    if terms < 1:
        raise ValueError("need at least one explicit term")
    s = 1.0 + epsilon / n
    k = np.arange(1, terms + 1, dtype=float)
    inner = float(np.sum(k ** (-s))) + float(terms) ** (-epsilon / n) * (n / epsilon)
    return 2.0**n * float(n) ** (n + epsilon) * (1.0 + inner) ** n


def elementary_inequalities(k: Iterable[int], epsilon: float) -> tuple[bool, bool]:
    """Check, at one nonzero lattice point, the two coordinate inequalities

        |k_1| + ... + |k_n|  <=  n * |k|_2
        (|k_1| + ... + |k_n|)^(n+eps)  >=  prod_l max(1, |k_l|^(1+eps/n))

    Returns the pair of truth values (they should both always be true).
    """
    pt = as_point(k)
    if all(c == 0 for c in pt):
        raise ValueError("the comparison needs a nonzero point")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    pts = np.asarray([pt], dtype=np.int64)
    first = bool(coordinate_sum_margin(pts)[0] <= INEQ_SLACK)
    second = bool(product_bound_margin(pts, len(pt), epsilon)[0] <= INEQ_SLACK)
    return first, second


def coordinate_sum_margin(pts: np.ndarray) -> np.ndarray:
    """Margin |k|_1 - n*|k|_2 (nonpositive when the inequality holds)."""
    a = np.abs(pts.astype(float))
    l1 = a.sum(axis=1)
    l2 = np.sqrt((a * a).sum(axis=1))
    return l1 - a.shape[1] * l2


def product_bound_margin(pts: np.ndarray, n: int, epsilon: float) -> np.ndarray:
    """Log-domain margin of prod_l max(1, |k_l|)^(1+eps/n) against |k|_1^(n+eps).

    Nonpositive entries mean the product bound holds at that point.  Evaluated
    in logs so large boxes cannot overflow.
    """
    a = np.abs(pts.astype(float))
    l1 = a.sum(axis=1)
    if np.any(l1 == 0):
        raise ValueError("the comparison needs nonzero points")
    rhs = (1.0 + epsilon / n) * np.sum(np.log(np.maximum(a, 1.0)), axis=1)
    lhs = (n + epsilon) * np.log(l1)
    return rhs - lhs
