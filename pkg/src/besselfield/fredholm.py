"""Quadrature-discretised Fredholm determinants: gap probabilities and count
distributions over finite unions of intervals.

The integral operator restricted to a union of bounded intervals is replaced
by its Nystrom matrix at Gauss-Legendre nodes, symmetrised with sqrt-weights.
Gap probabilities are det(I - M); joint count distributions come from the
generating determinant det(I + sum_j (z_j - 1) M_j), which is a polynomial in
each z_j, evaluated on a Chebyshev tensor grid and re-expanded around z = 0
by exact polynomial interpolation (never finite differences).

Intervals on equal-time, unequal-index slot pairs see a kernel jump along
x = y; panels are split at the endpoints of the overlapping intervals so the
discontinuity only crosses panel boundaries where possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernels import KernelSpec, kernel_matrix
from .quadrature import FLAG_OK, gauss_legendre, merge_flags


@dataclass(frozen=True)
class IntervalSet:
    """Disjoint bounded intervals, each attached to a path slot."""

    intervals: tuple

    def __post_init__(self):
        items = tuple((int(k), float(lo), float(hi)) for k, lo, hi in self.intervals)
        object.__setattr__(self, "intervals", items)
        for k, lo, hi in items:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise DomainError("interval bounds must be finite")
            if not (0.0 <= lo < hi):
                raise DomainError(f"need 0 <= lower < upper, got [{lo}, {hi}]")
        by_slot: dict[int, list] = {}
        for k, lo, hi in items:
            by_slot.setdefault(k, []).append((lo, hi))
        for k, ivs in by_slot.items():
            ivs.sort()
            for (l1, h1), (l2, h2) in zip(ivs, ivs[1:]):
                if l2 < h1:
                    raise DomainError(f"intervals overlap on slot {k}: [{l1},{h1}] and [{l2},{h2}]")

    def __len__(self):
        return len(self.intervals)


def interval_set(*intervals) -> IntervalSet:
    """Convenience constructor: interval_set((k, lo, hi), ...)."""
    return IntervalSet(tuple(intervals))


@dataclass(frozen=True)
class DiscretizedOperator:
    """Nystrom matrix of 1_E K 1_E with sqrt-weight symmetrisation."""

    slots: np.ndarray        # path slot per node
    points: np.ndarray       # abscissa per node
    weights: np.ndarray      # quadrature weight per node
    matrix: np.ndarray       # sqrt(w_a) K(p_a, p_b) sqrt(w_b)
    flag: str = FLAG_OK

    @property
    def size(self) -> int:
        return len(self.points)

    def trace(self) -> float:
        return float(np.trace(self.matrix)) if self.size else 0.0


def _split_points(spec: KernelSpec, E: IntervalSet, k: int, lo: float, hi: float):
    """Panel breakpoints inside (lo, hi) from intervals on equal-time slots of
    different index, where the kernel jumps along x = y."""
    pk = spec.point(k)
    cuts = set()
    for l, llo, lhi in E.intervals:
        pl = spec.point(l)
        if pl.t == pk.t and pl.alpha != pk.alpha:
            for c in (llo, lhi):
                if lo < c < hi:
                    cuts.add(c)
    return sorted(cuts)


def discretize(spec: KernelSpec, E: IntervalSet, order_per_interval: int) -> DiscretizedOperator:
    """Gauss-Legendre Nystrom discretisation of the kernel on E."""
    if order_per_interval < 1:
        raise DomainError("order_per_interval must be positive")
    slots, pts, wts = [], [], []
    for k, lo, hi in E.intervals:
        edges = [lo] + _split_points(spec, E, k, lo, hi) + [hi]
        total = hi - lo
        remaining = order_per_interval
        for idx, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
            if idx == len(edges) - 2:
                n = remaining
            else:
                n = max(4, int(round(order_per_interval * (b - a) / total)))
                n = min(n, remaining - 4 * (len(edges) - 2 - idx))
            remaining -= n
            x, w = gauss_legendre(a, b, max(n, 4))
            slots.append(np.full(len(x), k, dtype=int))
            pts.append(x)
            wts.append(w)
    if not pts:
        return DiscretizedOperator(
            np.empty(0, dtype=int), np.empty(0), np.empty(0), np.empty((0, 0))
        )
    slots = np.concatenate(slots)
    pts = np.concatenate(pts)
    wts = np.concatenate(wts)
    n = len(pts)
    sq = np.sqrt(wts)
    M = np.empty((n, n))
    flags = []
    for ki in np.unique(slots):
        sel_i = slots == ki
        for kj in np.unique(slots):
            sel_j = slots == kj
            block, flag = kernel_matrix(spec, int(ki), pts[sel_i], int(kj), pts[sel_j])
            M[np.ix_(sel_i, sel_j)] = block
            flags.append(flag)
    M *= sq[:, None]
    M *= sq[None, :]
    return DiscretizedOperator(slots, pts, wts, M, merge_flags(*flags))


def gap_probability(spec: KernelSpec, E: IntervalSet, order: int) -> float:
    """det(I - M): probability of no particles in E."""
    if order < 4:
        raise DomainError("quadrature order below 4 is unreliable; rejected")
    op = discretize(spec, E, order)
    if op.size == 0:
        return 1.0
    return float(np.linalg.det(np.eye(op.size) - op.matrix))


def expected_count(spec: KernelSpec, E: IntervalSet, order: int) -> float:
    """int_E K(x, x) dx via the operator trace."""
    return discretize(spec, E, order).trace()


def refinement_delta(spec: KernelSpec, E: IntervalSet, order: int) -> float:
    """Change in the gap probability when the quadrature order doubles."""
    return abs(gap_probability(spec, E, order) - gap_probability(spec, E, 2 * order))


# ---------------------------------------------------------------------------
# Joint count distributions
# ---------------------------------------------------------------------------

def _poly_from_values_matrix(nodes: np.ndarray) -> np.ndarray:
    """Matrix taking values on Chebyshev nodes to monomial coefficients."""
    n = len(nodes)
    V = np.polynomial.chebyshev.chebvander(nodes, n - 1)
    Vinv = np.linalg.inv(V)
    conv = np.empty((n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = 1.0
        p = np.polynomial.chebyshev.cheb2poly(e)
        conv[: len(p), c] = p
        conv[len(p):, c] = 0.0
    return conv @ Vinv


@dataclass(frozen=True)
class CountDistribution:
    """Joint law of particle counts over disjoint interval groups.

    ``probs[n1, ..., nl]`` approximates P(N_1 = n1, ..., N_l = nl) for counts
    up to n_max per group; entries beyond the fitted degree are out of range.
    """

    probs: np.ndarray
    n_max: int
    order: int
    expected_counts: tuple
    flag: str = FLAG_OK

    def probability(self, *counts: int) -> float:
        if len(counts) != self.probs.ndim:
            raise DomainError(f"expected {self.probs.ndim} counts")
        for c in counts:
            if not (0 <= c <= self.n_max):
                raise DomainError(f"count {c} beyond fitted degree {self.n_max}")
        return float(self.probs[tuple(counts)])

    def marginal(self, axis: int) -> np.ndarray:
        axes = tuple(a for a in range(self.probs.ndim) if a != axis)
        return self.probs.sum(axis=axes) if axes else self.probs.copy()


def count_distribution(
    spec: KernelSpec,
    groups,
    n_max: int,
    order: int,
) -> CountDistribution:
    """Joint count distribution over ``groups`` (a sequence of IntervalSets,
    disjoint across groups).

    The generating determinant D(z) = det(I + sum_j (z_j-1) M_j) is a
    polynomial of degree <= rank(M_j) in each z_j; it is sampled on a
    Chebyshev tensor grid and its monomial coefficients around 0 are the
    probabilities.  ``n_max`` must stay well below the operator ranks for the
    truncated fit to be exact; in practice the neglected coefficients are
    products of tiny operator eigenvalues.
    """
    if order < 4:
        raise DomainError("quadrature order below 4 is unreliable; rejected")
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    groups = [g if isinstance(g, IntervalSet) else IntervalSet(tuple(g)) for g in groups]
    union = IntervalSet(tuple(iv for g in groups for iv in g.intervals))
    op = discretize(spec, union, order)
    ell = len(groups)
    # group membership per node
    member = np.zeros(op.size, dtype=int)
    pos = 0
    for gi, g in enumerate(groups):
        for k, lo, hi in g.intervals:
            sel = (op.slots == k) & (op.points >= lo) & (op.points <= hi)
            member[sel] = gi
    n_nodes = max(n_max + 3, 6)
    zs = np.polynomial.chebyshev.chebpts1(n_nodes)
    conv = _poly_from_values_matrix(zs)

    shape = (n_nodes,) * ell
    values = np.empty(shape)
    eye = np.eye(op.size)
    for idx in np.ndindex(shape):
        colscale = np.array([zs[idx[member[b]]] - 1.0 for b in range(op.size)])
        values[idx] = np.linalg.det(eye + op.matrix * colscale[None, :])
    coeffs = values
    for axis in range(ell):
        coeffs = np.tensordot(conv, coeffs, axes=([1], [axis]))
        coeffs = np.moveaxis(coeffs, 0, axis)
    sub = tuple(slice(0, n_max + 1) for _ in range(ell))
    probs = coeffs[sub]
    expected = tuple(
        float(np.sum(op.matrix.diagonal()[member == gi])) for gi in range(ell)
    )
    return CountDistribution(probs, n_max, order, expected, op.flag)
