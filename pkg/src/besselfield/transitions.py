"""One-particle transition densities of the Laguerre field and the
biorthogonal Laguerre families attached to them.

Three elementary moves exist: ``t_kernel`` advances time at fixed index (a
squared-Bessel step), ``w_kernel`` raises the index at fixed time (a Gamma
step, supported on x <= y), and ``w_bar_kernel`` lowers the index at fixed
time (a Beta-type step, supported on y <= x and independent of time).
``q_kernel`` / ``q_bar_kernel`` compose them along general time-like /
space-like moves, either by the defining convolution or through a single
Bessel-product integral, which is what makes large grids affordable.

Note the normalisations: t_kernel and w_kernel integrate to 1 in y, while the
bare w_bar_kernel integrates to Gamma(beta+1)/Gamma(alpha+1); its constants
ride separately in the space-like determinantal formulas.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyWarning, DomainError, OrderingError
from .oscillatory import jj_exp_integral_grid
from .paths import PathPoint, as_path_point, precedes_spacelike, precedes_timelike
from .quadrature import DEFAULT_RULE, FLAG_OK, QuadratureRule
from .special import bessel_i_scaled, laguerre, log_gamma_ratio


@dataclass(frozen=True)
class TimelikePair:
    """A strictly ordered time-like pair of path points with positive times."""

    start: PathPoint
    end: PathPoint

    def __post_init__(self):
        start, end = as_path_point(self.start), as_path_point(self.end)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)
        if start.t <= 0 or end.t <= 0:
            raise DomainError("transition pairs need strictly positive times")
        if not precedes_timelike(start, end):
            raise OrderingError(f"{start} does not precede {end} time-like")


@dataclass(frozen=True)
class SpacelikePair:
    """A strictly ordered space-like pair of path points with positive times."""

    start: PathPoint
    end: PathPoint

    def __post_init__(self):
        start, end = as_path_point(self.start), as_path_point(self.end)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)
        if start.t <= 0 or end.t <= 0:
            raise DomainError("transition pairs need strictly positive times")
        if not precedes_spacelike(start, end):
            raise OrderingError(f"{start} does not precede {end} space-like")


# ---------------------------------------------------------------------------
# Elementary moves
# ---------------------------------------------------------------------------

def t_kernel(alpha: int, t: float, x, s: float, y):
    """Squared-Bessel transition density from (t, x) to (s, y) at index alpha.

    Evaluated as (s-t)^{-1} (y/x)^{alpha/2} e^{-(sqrt x - sqrt y)^2/(s-t)}
    times the scaled modified Bessel function, so nothing overflows as
    s -> t.
    """
    if not s > t:
        raise OrderingError(f"t_kernel needs t < s, got t={t}, s={s}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("t_kernel needs x > 0 and y > 0")
    inv = 1.0 / (s - t)
    expo = np.exp(-((np.sqrt(x) - np.sqrt(y)) ** 2) * inv)
    val = inv * (y / x) ** (0.5 * alpha) * expo * bessel_i_scaled(alpha, 2.0 * np.sqrt(x * y) * inv)
    return float(val) if val.ndim == 0 else val


def w_kernel(alpha: int, beta: int, t: float, x, y):
    """Index-raising density at fixed time: Gamma(beta-alpha) jump supported
    on x <= y, evaluated in log space."""
    if not beta > alpha:
        raise OrderingError(f"w_kernel needs alpha < beta, got {alpha}, {beta}")
    if not t > 0:
        raise DomainError("w_kernel needs t > 0")
    m = beta - alpha
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = y - x
    ok = diff >= 0.0
    safe = np.where(ok & (diff > 0), diff, 1.0)
    logv = (m - 1.0) * np.log(safe) - m * math.log(t) - diff / t - math.lgamma(m)
    val = np.where(ok, np.exp(logv), 0.0)
    # boundary y == x: nonzero only for the unit jump m == 1
    if m == 1:
        val = np.where(ok & (diff == 0.0), math.exp(-m * math.log(t)), val)
    else:
        val = np.where(diff == 0.0, 0.0, val)
    out = np.asarray(val, dtype=float)
    return float(out) if out.ndim == 0 else out


def w_bar_kernel(alpha: int, beta: int, x, y):
    """Index-lowering density factor at fixed time, supported on y <= x.

    The bare kernel integrates over y in [0, x] to
    Gamma(beta+1)/Gamma(alpha+1), not to 1; normalisation constants are
    carried by the joint formulas that use it.  It does not depend on time.
    """
    if not alpha > beta:
        raise OrderingError(f"w_bar_kernel needs alpha > beta, got {alpha}, {beta}")
    m = alpha - beta
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0):
        raise DomainError("w_bar_kernel needs x > 0")
    diff = x - y
    ok = (diff >= 0.0) & (y >= 0.0)
    safe_diff = np.where(ok & (diff > 0), diff, 1.0)
    safe_y = np.where(ok & (y > 0), y, 1.0)
    logv = (-alpha) * np.log(x) + beta * np.log(safe_y) + (m - 1.0) * np.log(safe_diff) - math.lgamma(m)
    val = np.where(ok, np.exp(logv), 0.0)
    if m == 1:
        val = np.where(ok & (diff == 0.0), np.exp((-alpha) * np.log(x) + beta * np.log(safe_y) - math.lgamma(m)), val)
    else:
        val = np.where(diff == 0.0, 0.0, val)
    if beta == 0:
        val = np.where(ok & (y == 0.0), np.exp((-alpha) * np.log(x) + (m - 1.0) * np.log(np.where(x > 0, x, 1.0)) - math.lgamma(m)), val)
    else:
        val = np.where(y == 0.0, 0.0, val)
    out = np.asarray(val, dtype=float)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Composite moves
# ---------------------------------------------------------------------------

def _warn_tail(flag: str, what: str):
    if flag != FLAG_OK:
        warnings.warn(f"{what}: truncated tail still above tolerance", AccuracyWarning)


def q_kernel_grid(pair: TimelikePair, xs, ys, rule: QuadratureRule = DEFAULT_RULE):
    """Time-like transition density on a grid xs x ys.  Returns (matrix, flag)."""
    if not isinstance(pair, TimelikePair):
        pair = TimelikePair(*pair)
    (alpha, t), (beta, s) = (pair.start.alpha, pair.start.t), (pair.end.alpha, pair.end.t)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if alpha == beta:
        return t_kernel(alpha, t, xs[:, None], s, ys[None, :]), FLAG_OK
    if t == s:
        return w_kernel(alpha, beta, t, xs[:, None], ys[None, :]), FLAG_OK
    # general move: single Bessel-product integral with rescaled arguments
    m = beta - alpha
    u_hi = rule.truncation_point(s - t)
    inner, flag = jj_exp_integral_grid(
        alpha, beta, (s / t) * xs, (t / s) * ys, -0.5 * m, s - t, 0.0, u_hi, rule
    )
    pref = (
        (s * t) ** (-0.5 * m)
        * np.exp(xs / t)[:, None]
        * np.exp(-ys / s)[None, :]
        * (xs ** (-0.5 * alpha))[:, None]
        * (ys ** (0.5 * beta))[None, :]
    )
    return pref * inner, flag


def q_kernel(pair, x: float, y: float, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Time-like transition density; dispatches on the kind of move."""
    M, flag = q_kernel_grid(pair, [x], [y], rule)
    _warn_tail(flag, "q_kernel")
    return float(M[0, 0])


def q_bar_kernel_grid(pair: SpacelikePair, xs, ys, rule: QuadratureRule = DEFAULT_RULE):
    """Space-like transition kernel on a grid xs x ys.  Returns (matrix, flag)."""
    if not isinstance(pair, SpacelikePair):
        pair = SpacelikePair(*pair)
    (alpha, t), (beta, s) = (pair.start.alpha, pair.start.t), (pair.end.alpha, pair.end.t)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if alpha == beta:
        return t_kernel(alpha, t, xs[:, None], s, ys[None, :]), FLAG_OK
    if t == s:
        return w_bar_kernel(alpha, beta, xs[:, None], ys[None, :]), FLAG_OK
    m = alpha - beta
    u_hi = rule.truncation_point(s - t)
    inner, flag = jj_exp_integral_grid(alpha, beta, xs, ys, -0.5 * m, s - t, 0.0, u_hi, rule)
    pref = (xs ** (-0.5 * alpha))[:, None] * (ys ** (0.5 * beta))[None, :]
    return pref * inner, flag


def q_bar_kernel(pair, x: float, y: float, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Space-like transition kernel; dispatches on the kind of move."""
    M, flag = q_bar_kernel_grid(pair, [x], [y], rule)
    _warn_tail(flag, "q_bar_kernel")
    return float(M[0, 0])


# ---------------------------------------------------------------------------
# Biorthogonal families
# ---------------------------------------------------------------------------

def phi(j: int, alpha: int, t: float, x):
    """phi_j(alpha, t, x): weighted Laguerre function; integrates against
    psi_j to the identity."""
    if j < 1:
        raise DomainError("phi needs j >= 1")
    x = np.asarray(x, dtype=float)
    ratio = math.exp(log_gamma_ratio(j, alpha))
    val = ratio * t ** (-float(j)) * (x / t) ** alpha * np.exp(-x / t) * laguerre(alpha, j - 1, x / t)
    return float(val) if np.ndim(val) == 0 else val


def psi(j: int, alpha: int, t: float, x):
    """psi_j(alpha, t, x) = t^{j-1} L^alpha_{j-1}(x/t)."""
    if j < 1:
        raise DomainError("psi needs j >= 1")
    x = np.asarray(x, dtype=float)
    val = t ** (j - 1.0) * laguerre(alpha, j - 1, x / t)
    return float(val) if np.ndim(val) == 0 else val


def _gamma_aj(j: int, alpha: int) -> float:
    n = alpha + j
    return math.gamma(n) if n <= 170 else math.exp(math.lgamma(n))


def phi_bar(j: int, alpha: int, t: float, x):
    """Space-like variant: Gamma(alpha+j) * phi_j."""
    return _gamma_aj(j, alpha) * phi(j, alpha, t, x)


def psi_bar(j: int, alpha: int, t: float, x):
    """Space-like variant: psi_j / Gamma(alpha+j)."""
    return psi(j, alpha, t, x) / _gamma_aj(j, alpha)
