"""Correlation kernels of the Laguerre field and their hard-edge limits.

Three kernel families share one evaluation interface:

* ``finite_raw``    - the N-particle kernel in unscaled eigenvalue
  coordinates at absolute times 1 + t/(4N);
* ``finite_gauged`` - the same kernel after the hard-edge rescaling and a
  gauge factor that keeps every term O(1); this is the form that converges;
* ``bessel_limit``  - the limiting kernels, built from Bessel-product
  integrals over [0, 1/4] (weakly reversed pairs) or [1/4, inf) (strictly
  ordered pairs).

Determinants of these kernels are gauge invariant, so the gauged form is the
right one for verification at large N; the raw form is recovered from it by
un-gauging, because direct summation of the raw series overflows once
N >~ 100.  A direct-summation reference (``kernel_finite_direct``) is kept
for cross-validation at small N.

All evaluators are pure; grids evaluate as matrix products.  A path may
repeat points (weak ordering): repeated points share the projection part of
the kernel and drop the strict-order transition term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, OrderingError
from .oscillatory import jj_exp_integral_grid, jj_full_integral_closed_form
from .paths import (
    SPACE_LIKE,
    TIME_LIKE,
    PathPoint,
    as_path_point,
    precedes_spacelike,
    precedes_timelike,
)
from .quadrature import DEFAULT_RULE, FLAG_OK, QuadratureRule, merge_flags
from .special import laguerre_all
from .transitions import (
    SpacelikePair,
    TimelikePair,
    phi,
    phi_bar,
    psi,
    psi_bar,
    q_bar_kernel,
    q_kernel,
)

FINITE_RAW = "finite_raw"
FINITE_GAUGED = "finite_gauged"
BESSEL_LIMIT = "bessel_limit"
_KINDS = (FINITE_RAW, FINITE_GAUGED, BESSEL_LIMIT)


@dataclass(frozen=True)
class KernelValue:
    value: float
    accuracy_flag: str = FLAG_OK


@dataclass(frozen=True)
class KernelSpec:
    """A correlation kernel pinned to a path of (alpha, t) points.

    Times are always in hard-edge units: finite kinds evaluate the underlying
    field at absolute time 1 + t/(4N).  ``finite_raw`` takes raw eigenvalue
    coordinates; the other kinds take hard-edge coordinates (eigenvalues
    magnified by 4N).
    """

    kind: str
    ordering: str
    path: tuple
    N: int | None = None
    quadrature: QuadratureRule = field(default_factory=QuadratureRule)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown kernel kind {self.kind!r}")
        if self.ordering not in (TIME_LIKE, SPACE_LIKE):
            raise DomainError(f"unknown ordering {self.ordering!r}")
        pts = tuple(as_path_point(p) for p in self.path)
        if not pts:
            raise DomainError("path must be non-empty")
        object.__setattr__(self, "path", pts)
        prec = precedes_timelike if self.ordering == TIME_LIKE else precedes_spacelike
        for p, q in zip(pts, pts[1:]):
            if not prec(p, q, strict=False):
                raise OrderingError(f"path not {self.ordering} ordered at {p} -> {q}")
        if self.kind == BESSEL_LIMIT:
            if self.N is not None:
                raise DomainError("bessel_limit kernels carry no N")
        else:
            if self.N is None or self.N < 1:
                raise DomainError("finite kernels need N >= 1")
            for p in pts:
                if 1.0 + p.t / (4.0 * self.N) <= 0.0:
                    raise DomainError(f"time {p.t} lies outside (-4N, inf) for N={self.N}")

    def point(self, i: int) -> PathPoint:
        if not (0 <= i < len(self.path)):
            raise DomainError(f"path index {i} out of range")
        return self.path[i]

    def _strict(self, pi: PathPoint, pj: PathPoint) -> bool:
        prec = precedes_timelike if self.ordering == TIME_LIKE else precedes_spacelike
        return prec(pi, pj, strict=True)


def _as_grid(x):
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("kernel coordinates must be finite and >= 0")
    return arr


# ---------------------------------------------------------------------------
# Limiting kernels
# ---------------------------------------------------------------------------

def _bessel_block(spec: KernelSpec, pi: PathPoint, pj: PathPoint, xs, ys):
    a, t = pi.alpha, pi.t
    b, s = pj.alpha, pj.t
    time_like = spec.ordering == TIME_LIKE
    power = -0.5 * (b - a) if time_like else -0.5 * (a - b)
    rule = spec.quadrature
    if spec._strict(pi, pj):
        if s > t:
            u_hi = rule.truncation_point(s - t, u_lo=0.25)
            M, flag = jj_exp_integral_grid(a, b, xs, ys, power, s - t, 0.25, u_hi, rule)
            return -M, flag
        # pure index move: the tail integral only converges conditionally, so
        # use (closed form of the full integral) - (head over [0, 1/4])
        closed = jj_full_integral_closed_form(a, b, xs, ys, time_like)
        head, flag = jj_exp_integral_grid(a, b, xs, ys, power, 0.0, 0.0, 0.25, rule)
        return head - closed, flag
    head, flag = jj_exp_integral_grid(a, b, xs, ys, power, s - t, 0.0, 0.25, rule)
    return head, flag


# ---------------------------------------------------------------------------
# Finite-N kernels (gauged parametrisation)
# ---------------------------------------------------------------------------

def _log_gamma_ratios(n: int, beta: int) -> np.ndarray:
    """log(Gamma(j)/Gamma(beta+j)) for j = 1..n as explicit log sums."""
    j = np.arange(1, n + 1, dtype=float)
    if beta == 0:
        return np.zeros(n)
    return -np.log(j[:, None] + np.arange(beta, dtype=float)[None, :]).sum(axis=1)


def _gauged_block(spec: KernelSpec, pi: PathPoint, pj: PathPoint, xs, ys):
    N = spec.N
    a, t = pi.alpha, pi.t
    b, s = pj.alpha, pj.t
    time_like = spec.ordering == TIME_LIKE
    rule = spec.quadrature
    t4, s4 = 4.0 * N + t, 4.0 * N + s
    tt, ss = t4 / (4.0 * N), s4 / (4.0 * N)
    xhat, yhat = xs / t4, ys / s4

    # projection part: biorthogonal sum with every factor O(1)
    La = laguerre_all(a, N - 1, xhat)
    Lb = laguerre_all(b, N - 1, yhat)
    jidx = np.arange(1, N + 1, dtype=float)
    logc = _log_gamma_ratios(N, b if time_like else a) + jidx * math.log(tt / ss)
    coeff = np.exp(logc)
    S = np.einsum("jx,j,jy->xy", La, coeff, Lb)
    ex = np.exp(-xs / (2.0 * t4))
    ey = np.exp(-ys / (2.0 * s4))
    if time_like:
        pref = (
            (4.0 * N) ** (0.5 * (b - a) - 1.0)
            / tt
            * (xhat ** (0.5 * a) * ex)[:, None]
            * (yhat ** (0.5 * b) * ey)[None, :]
        )
    else:
        pref = (
            (4.0 * N) ** (-1.0)
            * s4 ** (-float(b))
            / tt
            * (xs ** (0.5 * a) * ex)[:, None]
            * (ys ** (0.5 * b) * ey)[None, :]
        )
    K = pref * S
    flag = FLAG_OK

    if spec._strict(pi, pj):
        if s > t:
            u_hi = rule.truncation_point(s - t)
            if time_like:
                xN = (s4 / t4) * xs
                yN = (t4 / s4) * ys
                inner, flag = jj_exp_integral_grid(a, b, xN, yN, -0.5 * (b - a), s - t, 0.0, u_hi, rule)
            else:
                inner, flag = jj_exp_integral_grid(a, b, xs, ys, -0.5 * (a - b), s - t, 0.0, u_hi, rule)
        else:
            inner = jj_full_integral_closed_form(a, b, xs, ys, time_like)
        if time_like:
            trans = tt ** (-0.5 * b) * ss ** (0.5 * a) * (1.0 / ex)[:, None] * ey[None, :] * inner
        else:
            trans = ex[:, None] * (1.0 / ey)[None, :] * inner
        K = K - trans
    return K, flag


def _raw_block(spec: KernelSpec, pi: PathPoint, pj: PathPoint, xs, ys):
    """Raw kernel via un-gauging; xs, ys in unscaled eigenvalue coordinates."""
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("finite_raw kernels need strictly positive coordinates")
    N = spec.N
    a, t = pi.alpha, pi.t
    b, s = pj.alpha, pj.t
    tt, ss = 1.0 + t / (4.0 * N), 1.0 + s / (4.0 * N)
    G, flag = _gauged_block(spec, pi, pj, 4.0 * N * xs, 4.0 * N * ys)
    ex = np.exp(xs / (2.0 * tt))
    ey = np.exp(-ys / (2.0 * ss))
    if spec.ordering == TIME_LIKE:
        fac = (
            (4.0 * N) ** (1.0 - 0.5 * (b - a))
            * ((xs / tt) ** (-0.5 * a) * ex)[:, None]
            * ((ys / ss) ** (0.5 * b) * ey)[None, :]
        )
    else:
        fac = (
            (4.0 * N) ** (1.0 + 0.5 * (b - a))
            * (xs ** (-0.5 * a) * ex)[:, None]
            * (ys ** (0.5 * b) * ey)[None, :]
        )
    return fac * G, flag


# ---------------------------------------------------------------------------
# Public interface
# ---------------------------------------------------------------------------

_BLOCKS = {
    BESSEL_LIMIT: _bessel_block,
    FINITE_GAUGED: _gauged_block,
    FINITE_RAW: _raw_block,
}


def kernel_matrix(spec: KernelSpec, i: int, xs, j: int, ys):
    """Kernel block K((path[i], x); (path[j], y)) over xs x ys.

    Returns (matrix, accuracy_flag); deterministic for identical inputs.
    """
    pi, pj = spec.point(i), spec.point(j)
    return _BLOCKS[spec.kind](spec, pi, pj, _as_grid(xs), _as_grid(ys))


def kernel_value(spec: KernelSpec, i: int, x: float, j: int, y: float) -> KernelValue:
    M, flag = kernel_matrix(spec, i, [x], j, [y])
    return KernelValue(float(M[0, 0]), flag)


def kernel_finite(spec: KernelSpec, i: int, x: float, j: int, y: float) -> KernelValue:
    if spec.kind != FINITE_RAW:
        raise DomainError("kernel_finite needs a finite_raw spec")
    return kernel_value(spec, i, x, j, y)


def kernel_gauged(spec: KernelSpec, i: int, x: float, j: int, y: float) -> KernelValue:
    if spec.kind != FINITE_GAUGED:
        raise DomainError("kernel_gauged needs a finite_gauged spec")
    return kernel_value(spec, i, x, j, y)


def kernel_bessel(spec: KernelSpec, i: int, x: float, j: int, y: float) -> KernelValue:
    if spec.kind != BESSEL_LIMIT:
        raise DomainError("kernel_bessel needs a bessel_limit spec")
    return kernel_value(spec, i, x, j, y)


def gauge_factor_ratio(spec: KernelSpec, i: int, x: float, j: int, y: float) -> float:
    """f(alpha,t,x)/f(beta,s,y) relating the gauged kernel to the plainly
    rescaled one: gauged = ratio * (4N)^{-1} * raw(x/4N, y/4N)."""
    if spec.kind == BESSEL_LIMIT:
        raise DomainError("gauge factor is only defined for finite kernels")
    N = spec.N
    pi, pj = spec.point(i), spec.point(j)
    a, t = pi.alpha, pi.t
    b, s = pj.alpha, pj.t
    if spec.ordering == TIME_LIKE:
        return (
            (4.0 * N) ** (0.5 * (b - a))
            * (x / (4.0 * N + t)) ** (0.5 * a)
            * (y / (4.0 * N + s)) ** (-0.5 * b)
            * math.exp(-x / (8.0 * N + 2.0 * t) + y / (8.0 * N + 2.0 * s))
        )
    return (
        x ** (0.5 * a)
        * y ** (-0.5 * b)
        * math.exp(-x / (8.0 * N + 2.0 * t) + y / (8.0 * N + 2.0 * s))
    )


def kernel_finite_direct(spec: KernelSpec, i: int, x: float, j: int, y: float) -> float:
    """Direct Eynard-Mehta summation of the raw kernel.

    Reference path for validating the un-gauged evaluator; overflows once N
    or the coordinates grow (N <~ 40 and moderate x are safe), so it is not
    used in production evaluation.
    """
    if spec.kind != FINITE_RAW:
        raise DomainError("kernel_finite_direct needs a finite_raw spec")
    N = spec.N
    pi, pj = spec.point(i), spec.point(j)
    a, ta = pi.alpha, 1.0 + pi.t / (4.0 * N)
    b, tb = pj.alpha, 1.0 + pj.t / (4.0 * N)
    time_like = spec.ordering == TIME_LIKE
    if time_like:
        total = sum(psi(k, a, ta, x) * phi(k, b, tb, y) for k in range(1, N + 1))
    else:
        total = sum(psi_bar(k, a, ta, x) * phi_bar(k, b, tb, y) for k in range(1, N + 1))
    if spec._strict(pi, pj):
        if time_like:
            total -= q_kernel(TimelikePair((a, ta), (b, tb)), x, y, spec.quadrature)
        else:
            total -= q_bar_kernel(SpacelikePair((a, ta), (b, tb)), x, y, spec.quadrature)
    return float(total)
