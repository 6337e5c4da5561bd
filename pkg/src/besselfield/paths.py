"""Points of the two-parameter field and their partial orders.

A path point is a pair (alpha, t) with integer index alpha >= 0 and a real
time t.  Two orderings matter: the time-like order (alpha and t both
non-decreasing) and the space-like order (alpha non-increasing, t
non-decreasing).  Sequences monotone under one of them carry a Markov and a
determinantal structure; everything downstream keys off these predicates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError

TIME_LIKE = "time_like"
SPACE_LIKE = "space_like"


@dataclass(frozen=True, order=False)
class PathPoint:
    alpha: int
    t: float

    def __post_init__(self):
        if not isinstance(self.alpha, int) or self.alpha < 0:
            raise DomainError(f"alpha must be a non-negative integer, got {self.alpha!r}")
        if not isinstance(self.t, (int, float)) or self.t != self.t:
            raise DomainError(f"t must be a finite real, got {self.t!r}")
        object.__setattr__(self, "t", float(self.t))


def as_path_point(p) -> PathPoint:
    """Coerce a PathPoint or an (alpha, t) pair."""
    if isinstance(p, PathPoint):
        return p
    alpha, t = p
    return PathPoint(int(alpha), float(t))


def precedes_timelike(p, q, strict: bool = True) -> bool:
    """p precedes q in the time-like order: alpha and t both non-decreasing."""
    p, q = as_path_point(p), as_path_point(q)
    if p.alpha > q.alpha or p.t > q.t:
        return False
    return (p != q) if strict else True


def precedes_spacelike(p, q, strict: bool = True) -> bool:
    """p precedes q in the space-like order: alpha non-increasing, t non-decreasing."""
    p, q = as_path_point(p), as_path_point(q)
    if p.alpha < q.alpha or p.t > q.t:
        return False
    return (p != q) if strict else True


def classify_path(points) -> str:
    """Classify a sequence of path points.

    Returns one of ``"time_like"``, ``"space_like"``, ``"both"``, ``"neither"``.
    ``"both"`` occurs exactly when alpha is constant and t strictly increases.
    """
    pts = [as_path_point(p) for p in points]
    if len(pts) < 2:
        raise DomainError("classify_path needs at least two points")
    tl = all(precedes_timelike(a, b) for a, b in zip(pts, pts[1:]))
    sl = all(precedes_spacelike(a, b) for a, b in zip(pts, pts[1:]))
    if tl and sl:
        return "both"
    if tl:
        return TIME_LIKE
    if sl:
        return SPACE_LIKE
    return "neither"
