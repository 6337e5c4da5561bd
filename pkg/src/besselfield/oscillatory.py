"""Vectorised evaluation of exponentially damped Bessel-product integrals.

The kernels of this package all reduce to

    I(x, y) = int_{u_lo}^{u_hi}  e^{-c u} u^p J_a(2 sqrt(x u)) J_b(2 sqrt(y u)) du

evaluated over whole grids of (x, y) at once.  The integrand separates into
an x-factor, a y-factor and a shared weight, so a grid block is one matrix
product A diag(W) B^T.  Nodes come from :class:`QuadratureRule` in the
oscillation-resolving variable v = sqrt(u).
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import FLAG_OK, QuadratureRule, merge_flags
from .special import bessel_j


def _osc_rate(xs: np.ndarray, ys: np.ndarray) -> float:
    """Fastest phase rate in v of J_a(2 sqrt(x) v) J_b(2 sqrt(y) v)."""
    return 2.0 * (math.sqrt(float(np.max(xs, initial=0.0)))
                  + math.sqrt(float(np.max(ys, initial=0.0))))


def jj_exp_integral_grid(
    a: int,
    b: int,
    xs,
    ys,
    power: float,
    decay: float,
    u_lo: float,
    u_hi: float,
    rule: QuadratureRule,
):
    """Grid of I(x, y) over xs x ys.  Returns (matrix, flag)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    u, w, tail = rule.u_nodes(u_lo, u_hi, _osc_rate(xs, ys), max(decay, 0.0))
    weight = w * u**power
    if decay != 0.0:
        weight = weight * np.exp(-decay * u)
    A = bessel_j(a, 2.0 * np.sqrt(np.multiply.outer(xs, u)))
    B = bessel_j(b, 2.0 * np.sqrt(np.multiply.outer(ys, u)))
    M = (A * weight) @ B.T
    if decay > 0.0:
        tail_block = (A[:, tail] * weight[tail]) @ B[:, tail].T
        per_pair = np.abs(tail_block) - rule.tail_eps * np.maximum(1.0, np.abs(M))
        flag = rule.tail_flag(
            np.array([np.max(np.abs(tail_block))]),
            float(np.max(np.abs(M), initial=1.0)),
        ) if np.any(per_pair > 0) else FLAG_OK
    else:
        flag = FLAG_OK
    return M, flag


def jj_exp_integral(a, b, x, y, power, decay, u_lo, u_hi, rule):
    """Scalar variant of :func:`jj_exp_integral_grid`."""
    M, flag = jj_exp_integral_grid(a, b, [x], [y], power, decay, u_lo, u_hi, rule)
    return float(M[0, 0]), flag


def jj_full_integral_closed_form(a: int, b: int, xs, ys, time_like: bool):
    """Closed form of int_0^inf u^{-(b-a)/2} J_a(2 sqrt(xu)) J_b(2 sqrt(yu)) du
    (time-like exponent; pass time_like=False for the u^{-(a-b)/2} variant).

    Time-like (a < b):   1(x<=y) x^{a/2} y^{-b/2} (y-x)^{b-a-1} / Gamma(b-a)
    Space-like (a > b):  1(y<=x) x^{-a/2} y^{b/2} (x-y)^{a-b-1} / Gamma(a-b)
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    out = np.zeros_like(X)
    # The (0, 0) corner is excluded: the integrand vanishes identically there,
    # while the one-sided closed form can diverge.
    if time_like:
        if not b > a:
            raise ValueError("time-like closed form needs a < b")
        m = b - a
        mask = (X <= Y) & ~((X == 0.0) & (Y == 0.0))
        xv, yv = X[mask], Y[mask]
        out[mask] = xv ** (0.5 * a) * yv ** (-0.5 * b) * (yv - xv) ** (m - 1) / math.gamma(m)
    else:
        if not a > b:
            raise ValueError("space-like closed form needs a > b")
        m = a - b
        mask = (Y <= X) & ~((X == 0.0) & (Y == 0.0))
        xv, yv = X[mask], Y[mask]
        out[mask] = xv ** (-0.5 * a) * yv ** (0.5 * b) * (xv - yv) ** (m - 1) / math.gamma(m)
    return out
