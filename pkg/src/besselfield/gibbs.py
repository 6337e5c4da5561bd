"""Interlacing predicates, the indicator determinant identity, and uniform
resampling of interlacing bridge ensembles.

At fixed time the field's lines, viewed as functions of the index alpha, are
conditionally uniform on the polytope of weakly interlacing sequences given
their boundary.  The resampler draws each line as sorted uniforms between its
entrance and exit values and accepts when the whole window interlaces - an
exactly uniform scheme, at the cost of rejection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StarvationError
from .simulate import RngStream


def _check_sorted(v: np.ndarray, name: str):
    if np.any(np.diff(v) < 0):
        raise DomainError(f"{name} must be sorted ascending")


def interlaces(a, b, strict: bool = True) -> bool:
    """Whether a_1 ? b_1 ? a_2 ? ... ? a_N ? b_N holds (? is < or <=)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError("interlaces needs two equal-length vectors")
    _check_sorted(a, "a")
    _check_sorted(b, "b")
    if strict:
        return bool(np.all(a < b) and np.all(b[:-1] < a[1:]))
    return bool(np.all(a <= b) and np.all(b[:-1] <= a[1:]))


def sasamoto_det(a, b) -> int:
    """det[ 1(a_i < b_j) ] by fraction-free integer elimination.

    Equals 1 exactly when a strictly interlaces b, else 0; the inputs must
    not share values.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError("sasamoto_det needs two equal-length vectors")
    _check_sorted(a, "a")
    _check_sorted(b, "b")
    if np.any(a[:, None] == b[None, :]):
        raise DomainError("sasamoto_det requires a_i != b_j for all i, j")
    n = len(a)
    M = [[int(a[i] < b[j]) for j in range(n)] for i in range(n)]
    # Bareiss elimination over the integers
    sign = 1
    prev = 1
    for col in range(n - 1):
        if M[col][col] == 0:
            swap = next((r for r in range(col + 1, n) if M[r][col] != 0), None)
            if swap is None:
                return 0
            M[col], M[swap] = M[swap], M[col]
            sign = -sign
        for r in range(col + 1, n):
            for c in range(col + 1, n):
                M[r][c] = (M[r][c] * M[col][col] - M[r][col] * M[col][c]) // prev
            M[r][col] = 0
        prev = M[col][col]
    return sign * M[n - 1][n - 1]


def _augmented(col: np.ndarray, z: float | None) -> np.ndarray:
    return col if z is None else np.append(col, z)


def chain_interlaces(columns, z=None, strict: bool = False) -> bool:
    """Whether consecutive columns (optionally augmented with the top
    boundary z) weakly interlace along the whole window."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    zs = list(z) if z is not None else [None] * len(cols)
    if len(zs) != len(cols):
        raise DomainError("z must carry one value per column")
    for (c1, z1), (c2, z2) in zip(zip(cols, zs), zip(cols[1:], zs[1:])):
        if not interlaces(_augmented(c1, z1), _augmented(c2, z2), strict=strict):
            return False
    return True


@dataclass(frozen=True)
class InterlacingWindow:
    """Boundary data of a resampling window.

    ``k`` lines are resampled on columns a+1 .. b-1; ``entrance``/``exit``
    hold those lines at columns a and b; ``top`` (optional) is line k+1
    across columns a .. b.  Compatibility of synthetic boundary data is
    established either by a witness configuration (the production path: the
    current interior lines) or, absent one, by the sampler itself, which
    raises :class:`StarvationError` when it cannot find the polytope.
    """

    a: int
    b: int
    entrance: np.ndarray
    exit: np.ndarray
    top: np.ndarray | None = None

    def __post_init__(self):
        if not (0 <= self.a < self.b):
            raise DomainError("need 0 <= a < b")
        x = np.asarray(self.entrance, dtype=float)
        y = np.asarray(self.exit, dtype=float)
        object.__setattr__(self, "entrance", x)
        object.__setattr__(self, "exit", y)
        if x.shape != y.shape or x.ndim != 1 or len(x) < 1:
            raise DomainError("entrance and exit must be equal-length vectors")
        if np.any(np.diff(x) <= 0) or np.any(np.diff(y) <= 0):
            raise DomainError("entrance and exit must be strictly increasing")
        if np.any(y < x):
            raise DomainError("exit must dominate entrance componentwise")
        if self.top is not None:
            z = np.asarray(self.top, dtype=float)
            object.__setattr__(self, "top", z)
            if z.shape != (self.b - self.a + 1,):
                raise DomainError(f"top boundary needs {self.b - self.a + 1} values")
            if np.any(np.diff(z) < 0):
                raise DomainError("top boundary must be non-decreasing")

    @property
    def k(self) -> int:
        return len(self.entrance)

    @property
    def interior(self) -> int:
        return self.b - self.a - 1

    def accepts(self, values: np.ndarray) -> bool:
        """Whether interior column values (k x interior) close the window."""
        cols = [self.entrance] + [values[:, i] for i in range(self.interior)] + [self.exit]
        return chain_interlaces(cols, z=self.top, strict=False)


@dataclass(frozen=True)
class BridgeConfiguration:
    """Interior lines of a window: values[j, i] is line j+1 at column a+1+i.

    ``attempts`` records how many candidates the sampler drew before this one
    was accepted (0 when the configuration was built by hand).
    """

    window: InterlacingWindow
    values: np.ndarray
    attempts: int = 0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.window.k, self.window.interior):
            raise DomainError("values shape must be (k, b-a-1)")
        if not self.window.accepts(vals):
            raise DomainError("configuration violates the interlacing chain")


def sample_bridge(
    window: InterlacingWindow,
    rng: RngStream | np.random.Generator,
    max_attempts: int = 10_000_000,
    batch: int = 512,
) -> BridgeConfiguration:
    """Uniform draw from the interlacing polytope by rejection.

    Candidates place each line at sorted uniforms between its entrance and
    exit values; acceptance conditions on the full weak-interlacing chain
    (including the top boundary when present), which makes the accepted law
    exactly uniform.
    """
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    k, m = window.k, window.interior
    if m == 0:
        return BridgeConfiguration(window, np.empty((k, 0)), attempts=0)
    x, y = window.entrance, window.exit
    attempts = 0
    while attempts < max_attempts:
        n = min(batch, max_attempts - attempts)
        u = gen.random((n, k, m))
        u.sort(axis=2)
        cand = x[None, :, None] + (y - x)[None, :, None] * u
        for c in cand:
            attempts += 1
            if window.accepts(c):
                return BridgeConfiguration(window, c, attempts=attempts)
    raise StarvationError(
        f"no accepted bridge in {attempts} attempts "
        f"(window k={k}, columns={m})",
        attempts=attempts,
    )


def window_from_lines(lines: dict, a: int, b: int, k: int) -> InterlacingWindow:
    """Boundary data for resampling lines 1..k between columns a and b.

    ``lines[alpha]`` is the ascending value vector at column alpha.  When
    k equals the number of lines the full-ensemble form applies and no top
    boundary constrains the window; otherwise line k+1 across a..b does.
    """
    n_lines = len(lines[a])
    if not (1 <= k <= n_lines):
        raise DomainError(f"k must lie in 1..{n_lines}")
    x = np.asarray(lines[a][:k], dtype=float)
    y = np.asarray(lines[b][:k], dtype=float)
    top = None
    if k < n_lines:
        top = np.asarray([lines[g][k] for g in range(a, b + 1)], dtype=float)
    return InterlacingWindow(a, b, x, y, top)


def apply_bridge(lines: dict, bridge: BridgeConfiguration) -> dict:
    """New line family with the window interior replaced by ``bridge``.

    Arrays outside the window columns are reused as-is; inside them, only the
    first k entries change.
    """
    window = bridge.window
    out = dict(lines)
    for i, g in enumerate(range(window.a + 1, window.b)):
        col = np.asarray(lines[g], dtype=float).copy()
        col[: window.k] = bridge.values[:, i]
        out[g] = col
    return out


def gibbs_resample(
    lines: dict,
    window: InterlacingWindow,
    rng: RngStream | np.random.Generator,
    max_attempts: int = 10_000_000,
) -> dict:
    """Replace the interior of the window by a fresh uniform bridge.

    ``lines`` maps each column index alpha in [a, b] to its ascending value
    vector.  Entries outside lines 1..k of columns a+1..b-1 are returned
    unchanged (same arrays outside the window, copied arrays with identical
    values elsewhere).
    """
    for g in range(window.a, window.b + 1):
        if g not in lines:
            raise DomainError(f"lines missing column {g}")
    bridge = sample_bridge(window, rng, max_attempts=max_attempts)
    return apply_bridge(lines, bridge)


def candidate_volume_factor(window: InterlacingWindow) -> float:
    """(m!)^k / prod_j (y_j - x_j)^m : reciprocal volume of the candidate
    law's support (per line, sorted m-tuples in [x_j, y_j]).

    Multiplying a Monte Carlo estimate of the polytope volume Z by this
    factor predicts the acceptance rate of :func:`sample_bridge`.
    """
    k, m = window.k, window.interior
    if m == 0:
        return 1.0
    spans = (window.exit - window.entrance) ** m
    return float(math.factorial(m)) ** k / float(np.prod(spans))
