"""Monte Carlo estimators of correlation functions, counts and gaps, with
z-score comparison against kernel or determinant predictions.

Estimates carry replica-level standard errors; `compare` integrates the
prediction over each bin with a 3-point rule (no midpoint bias) and passes
when at least 95% of bins sit within 3 sigma and none exceeds 5 sigma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fredholm import IntervalSet


@dataclass(frozen=True)
class BinnedEstimate:
    """Binned density estimate with replica-level standard errors.

    1-d: ``edges = (e,)`` and estimate/std_error have shape (len(e)-1,).
    2-d: ``edges = (ea, eb)`` and the arrays are (len(ea)-1, len(eb)-1).
    """

    edges: tuple
    estimate: np.ndarray
    std_error: np.ndarray
    replicas: int


@dataclass(frozen=True)
class ComparisonReport:
    z_scores: np.ndarray
    max_abs_z: float
    fraction_within_3: float
    excluded_bins: int
    passed: bool


def _edges(e) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    if e.ndim != 1 or len(e) < 2 or np.any(np.diff(e) <= 0):
        raise DomainError("bin edges must be strictly increasing, length >= 2")
    return e


def empirical_rho1(samples, edges) -> BinnedEstimate:
    """One-point intensity: per-replica bin counts over bin width."""
    edges = _edges(edges)
    if len(samples) < 100:
        raise DomainError("empirical_rho1 needs at least 100 replicas")
    widths = np.diff(edges)
    counts = np.stack([np.histogram(np.asarray(s, dtype=float), bins=edges)[0] for s in samples])
    dens = counts / widths
    est = dens.mean(axis=0)
    se = dens.std(axis=0, ddof=1) / np.sqrt(len(samples))
    return BinnedEstimate((edges,), est, se, len(samples))


def empirical_rho2(samples_a, samples_b, edges_a, edges_b, same_component: bool) -> BinnedEstimate:
    """Two-point intensity over bin pairs.

    ``samples_a[r]`` and ``samples_b[r]`` are replica r's configurations on
    the two slots.  With ``same_component=True`` the slots coincide and
    self-pairs are excluded (factorial-moment convention); otherwise all
    cross pairs count.
    """
    edges_a, edges_b = _edges(edges_a), _edges(edges_b)
    if len(samples_a) != len(samples_b):
        raise DomainError("slot sample lists must align per replica")
    if len(samples_a) < 1000:
        raise DomainError("empirical_rho2 needs at least 1000 replicas")
    wa, wb = np.diff(edges_a), np.diff(edges_b)
    area = np.outer(wa, wb)
    per = np.empty((len(samples_a), len(wa), len(wb)))
    for r, (sa, sb) in enumerate(zip(samples_a, samples_b)):
        sa = np.asarray(sa, dtype=float)
        sb = np.asarray(sb, dtype=float)
        ca = np.histogram(sa, bins=edges_a)[0]
        cb = np.histogram(sb, bins=edges_b)[0]
        pairs = np.outer(ca, cb).astype(float)
        if same_component:
            # remove self-pairs: particles landing in overlapping cells
            ia = np.digitize(sa, edges_a) - 1
            ib = np.digitize(sa, edges_b) - 1
            ok = (ia >= 0) & (ia < len(wa)) & (ib >= 0) & (ib < len(wb))
            np.subtract.at(pairs, (ia[ok], ib[ok]), 1.0)
        per[r] = pairs / area
    est = per.mean(axis=0)
    se = per.std(axis=0, ddof=1) / np.sqrt(len(samples_a))
    return BinnedEstimate((edges_a, edges_b), est, se, len(samples_a))


def empirical_gap(samples, E: IntervalSet):
    """Fraction of replicas with zero particles in E; returns (p, se).

    ``samples[r]`` is either an array (single slot 0) or a dict mapping path
    slots to arrays.
    """
    if len(E) == 0:
        return 1.0, 0.0
    if len(samples) < 1000:
        raise DomainError("empirical_gap needs at least 1000 replicas")
    hits = 0
    for s in samples:
        conf = s if isinstance(s, dict) else {0: s}
        empty = True
        for k, lo, hi in E.intervals:
            v = np.asarray(conf[k], dtype=float)
            if np.any((v >= lo) & (v <= hi)):
                empty = False
                break
        hits += empty
    p = hits / len(samples)
    se = np.sqrt(p * (1.0 - p) / len(samples))
    return p, se


_SIMPSON = np.array([1.0, 4.0, 1.0]) / 6.0


def _bin_average(prediction, edges, edges_b=None) -> np.ndarray:
    """Average the prediction over each bin by a 3-point rule per axis."""
    if edges_b is None:
        out = np.empty(len(edges) - 1)
        for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
            pts = np.array([lo, 0.5 * (lo + hi), hi])
            out[i] = float(np.dot(_SIMPSON, [prediction(p) for p in pts]))
        return out
    out = np.empty((len(edges) - 1, len(edges_b) - 1))
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        px = np.array([lo, 0.5 * (lo + hi), hi])
        for j, (lo2, hi2) in enumerate(zip(edges_b[:-1], edges_b[1:])):
            py = np.array([lo2, 0.5 * (lo2 + hi2), hi2])
            vals = np.array([[prediction(a, b) for b in py] for a in px])
            out[i, j] = float(_SIMPSON @ vals @ _SIMPSON)
    return out


def compare(estimate: BinnedEstimate, prediction) -> ComparisonReport:
    """z-scores of a binned estimate against a (callable) prediction.

    Bins with zero standard error are excluded from the score and counted.
    """
    if len(estimate.edges) == 1:
        pred = _bin_average(prediction, estimate.edges[0])
    else:
        pred = _bin_average(prediction, estimate.edges[0], estimate.edges[1])
    se = estimate.std_error
    ok = se > 0
    z = np.full(se.shape, np.nan)
    z[ok] = (estimate.estimate[ok] - pred[ok]) / se[ok]
    scored = z[ok]
    if scored.size == 0:
        return ComparisonReport(z, 0.0, 1.0, int((~ok).sum()), True)
    max_abs = float(np.max(np.abs(scored)))
    frac = float(np.mean(np.abs(scored) <= 3.0))
    return ComparisonReport(z, max_abs, frac, int((~ok).sum()), frac >= 0.95 and max_abs <= 5.0)


def quantile_edges(pooled, n_bins: int, lo: float | None = None, hi: float | None = None) -> np.ndarray:
    """Bin edges at pooled quantiles: roughly equal occupancy, never starved.

    Enforcing occupancy from a pilot keeps two-point determinant comparisons
    meaningful.
    """
    pooled = np.sort(np.asarray(pooled, dtype=float))
    if len(pooled) < 2 * n_bins:
        raise DomainError("too few pilot points for the requested bins")
    qs = np.linspace(0.0, 1.0, n_bins + 1)
    edges = np.quantile(pooled, qs)
    if lo is not None:
        edges[0] = lo
    if hi is not None:
        edges[-1] = hi
    edges = np.unique(edges)
    if len(edges) < 2:
        raise DomainError("degenerate quantile edges")
    return edges
