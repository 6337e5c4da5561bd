"""Gauss-Legendre quadrature with oscillation-aware panel composition.

The recurring integral in this package has the shape

    int_0^inf  e^{-c u} u^p J_a(2 sqrt(x u)) J_b(2 sqrt(y u)) du ,

whose integrand oscillates with phase ~ 2 sqrt(x u).  Substituting u = v^2
makes the phase linear in v (rate 2 sqrt(x)), so fixed-width panels in v each
contain a bounded number of oscillations and Gauss-Legendre converges
spectrally per panel.  ``QuadratureRule`` bundles the panel order, the tail
tolerance used to truncate exponentially decaying integrands, and an optional
hard truncation point for user-controlled transforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

FLAG_OK = "ok"
FLAG_TAIL = "tail_warning"


@lru_cache(maxsize=64)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gauss_legendre(a: float, b: float, n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    if not (b > a):
        raise DomainError(f"empty interval [{a}, {b}]")
    x, w = _leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def composite_legendre(a: float, b: float, n_panels: int, order: int):
    """Composite Gauss-Legendre rule: ``n_panels`` equal panels of ``order`` points."""
    edges = np.linspace(a, b, n_panels + 1)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(lo, hi, order)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


@dataclass(frozen=True)
class QuadratureRule:
    """Panel policy for the package's semi-infinite oscillatory integrals.

    points_per_panel : Gauss-Legendre order per panel.
    tail_eps         : truncate exponentially decaying tails once the remaining
                       mass estimate drops below this value; the last panel's
                       contribution is checked against it to flag violations.
    tail_safety      : multiplier on the -log(tail_eps)/decay truncation point.
    max_panels       : hard cap on the panel count of a single integral.
    u_max            : optional hard truncation point (in u), overriding the
                       decay-based policy; required when the integrand carries
                       no usable exponential decay.
    """

    points_per_panel: int = 16
    tail_eps: float = 1e-12
    tail_safety: float = 2.0
    max_panels: int = 4096
    u_max: float | None = None

    def __post_init__(self):
        if self.points_per_panel < 4:
            raise DomainError("points_per_panel must be at least 4")
        if not (0.0 < self.tail_eps < 1.0):
            raise DomainError("tail_eps must lie in (0, 1)")
        if self.tail_safety < 1.0:
            raise DomainError("tail_safety must be >= 1")

    # -- panel construction -------------------------------------------------

    def _v_panels(self, v_lo: float, v_hi: float, osc_rate: float, decay: float):
        """Panel edges in v on [v_lo, v_hi] resolving phase rate ``osc_rate``
        and the quadratic decay exp(-decay v^2)."""
        width = math.pi / max(osc_rate, 1.0)
        if decay > 0.0 and v_hi > 0.0:
            width = min(width, math.pi / (abs(decay) * v_hi))
        width = min(width, max(v_hi - v_lo, 1e-12))
        n = int(math.ceil((v_hi - v_lo) / width))
        n = min(max(n, 1), self.max_panels)
        return np.linspace(v_lo, v_hi, n + 1)

    def u_nodes(self, u_lo: float, u_hi: float, osc_rate: float, decay: float = 0.0):
        """Quadrature nodes/weights for int_{u_lo}^{u_hi} f(u) du in the
        substituted variable u = v^2.

        ``osc_rate`` is the phase rate in v of the fastest oscillatory factor
        (for J_a(2 sqrt(x u)) J_b(2 sqrt(y u)) use 2(sqrt(x)+sqrt(y))).
        Returns (u, w, tail) where ``tail`` is a slice selecting the last
        panel's nodes, for truncation-error checks.
        """
        if u_hi <= u_lo:
            raise DomainError(f"empty u-interval [{u_lo}, {u_hi}]")
        v_lo, v_hi = math.sqrt(max(u_lo, 0.0)), math.sqrt(u_hi)
        edges = self._v_panels(v_lo, v_hi, osc_rate, decay)
        vs, ws = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, w = gauss_legendre(lo, hi, self.points_per_panel)
            vs.append(v)
            ws.append(w)
        v = np.concatenate(vs)
        w = np.concatenate(ws)
        tail = slice(len(v) - self.points_per_panel, len(v))
        return v * v, 2.0 * v * w, tail

    def truncation_point(self, decay: float, u_lo: float = 0.0) -> float:
        """Upper limit for a tail decaying like exp(-decay u)."""
        if self.u_max is not None:
            return max(self.u_max, u_lo)
        if decay <= 0.0:
            raise DomainError(
                "integrand has no exponential decay; set u_max on the rule"
            )
        return u_lo + max(1.0, -math.log(self.tail_eps) / decay) * self.tail_safety

    def tail_flag(self, contributions: np.ndarray, total: float) -> str:
        """Flag the truncation as suspect when the last panel still matters."""
        last = float(np.abs(contributions).sum())
        if last > self.tail_eps * max(1.0, abs(total)):
            return FLAG_TAIL
        return FLAG_OK


DEFAULT_RULE = QuadratureRule()


def merge_flags(*flags: str) -> str:
    return FLAG_TAIL if FLAG_TAIL in flags else FLAG_OK
