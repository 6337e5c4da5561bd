"""Exact coupled sampling of the Laguerre field.

A single realisation is a family of complex Gaussian increment matrices, one
per time interval; the field at (alpha, t) is the squared-singular-value
spectrum of the first N+alpha rows of the accumulated (N+alpha_max) x N
matrix.  Coupling across alpha comes from sharing rows, coupling across t
from summing increments, so one realisation serves every grid point with the
exact construction of the model.

Randomness is counter-based (Philox, keyed by (seed, stream id)); distinct
stream ids give independent, reproducible replicas regardless of worker
assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RangeError, SimulationError
from .paths import classify_path  # re-exported: path classification lives with the field

__all__ = [
    "RngStream",
    "FieldGrid",
    "FieldSample",
    "ScaledSample",
    "sample_field",
    "iter_samples",
    "hard_edge_rescale",
    "batch_eigenvalues",
    "classify_path",
    "GENERATOR_NAME",
]

GENERATOR_NAME = "philox4x64"


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream) pair naming one reproducible random sequence."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=[self.seed & 0xFFFFFFFFFFFFFFFF, self.stream & 0xFFFFFFFFFFFFFFFF])
        )

    def child(self, offset: int) -> "RngStream":
        return RngStream(self.seed, self.stream + offset)


@dataclass(frozen=True)
class FieldGrid:
    """The (alpha, t) points at which one realisation is evaluated."""

    N: int
    alphas: tuple
    times: tuple

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(int(a) for a in self.alphas))
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        if self.N < 1:
            raise DomainError("N must be >= 1")
        if not self.alphas or any(a < 0 for a in self.alphas):
            raise DomainError("alphas must be non-empty, non-negative")
        if any(a >= b for a, b in zip(self.alphas, self.alphas[1:])) or len(set(self.alphas)) != len(self.alphas):
            raise DomainError("alphas must be strictly increasing")
        if not self.times or any(t <= 0 for t in self.times):
            raise DomainError("times must be non-empty, positive")
        if any(s >= t for s, t in zip(self.times, self.times[1:])):
            raise DomainError("times must be strictly increasing")

    @property
    def alpha_max(self) -> int:
        return self.alphas[-1]


@dataclass(frozen=True)
class FieldSample:
    """One realisation: the Gaussian increments plus all requested spectra.

    ``eigenvalues[(alpha, t)]`` is the ascending eigenvalue vector of A*A at
    that grid point.  ``increments[k]`` is the complex increment matrix over
    (times[k-1], times[k]] (with times[-1] := 0).
    """

    grid: FieldGrid
    stream: RngStream
    increments: np.ndarray
    eigenvalues: dict

    def vector(self, alpha: int, t: float) -> np.ndarray:
        return self.eigenvalues[(alpha, float(t))]


def _draw_increments(grid: FieldGrid, rng: np.random.Generator) -> np.ndarray:
    rows, cols = grid.N + grid.alpha_max, grid.N
    prev = 0.0
    out = np.empty((len(grid.times), rows, cols), dtype=complex)
    for k, t in enumerate(grid.times):
        std = math.sqrt((t - prev) / 2.0)
        out[k] = std * (
            rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        )
        prev = t
    return out


def _spectra(grid: FieldGrid, increments: np.ndarray) -> dict:
    eig = {}
    B = np.zeros_like(increments[0])
    for k, t in enumerate(grid.times):
        B = B + increments[k]
        for alpha in grid.alphas:
            A = B[: grid.N + alpha, :]
            try:
                sv = np.linalg.svd(A, compute_uv=False)
            except np.linalg.LinAlgError as exc:
                raise SimulationError(f"eigensolver failed at (alpha={alpha}, t={t})") from exc
            eig[(alpha, t)] = np.sort(sv * sv)
    return eig


def sample_field(grid: FieldGrid, rng: RngStream) -> FieldSample:
    """Draw one coupled realisation of the field over the whole grid."""
    gen = rng.generator()
    inc = _draw_increments(grid, gen)
    return FieldSample(grid, rng, inc, _spectra(grid, inc))


def iter_samples(grid: FieldGrid, seed: int, replicas: int, stream_base: int = 0):
    """Yield ``replicas`` independent realisations, stream id = base + index."""
    for r in range(replicas):
        yield sample_field(grid, RngStream(seed, stream_base + r))


@dataclass(frozen=True)
class ScaledSample:
    """The hard-edge view: eigenvalues magnified by 4N around absolute time 1.

    ``values[(alpha, t)]`` with t in scaled units corresponds to
    4N * X(alpha, 1 + t/(4N)).
    """

    N: int
    values: dict

    def vector(self, alpha: int, t: float) -> np.ndarray:
        return self.values[(alpha, float(t))]


def hard_edge_rescale(sample: FieldSample, t_targets) -> ScaledSample:
    """Map scaled times t to absolute times 1 + t/(4N) and magnify by 4N."""
    N = sample.grid.N
    values = {}
    for t in t_targets:
        t = float(t)
        if t < -4.0 * N:
            raise RangeError(f"scaled time {t} below -4N = {-4.0 * N}")
        t_abs = 1.0 + t / (4.0 * N)
        key_match = [u for u in sample.grid.times if math.isclose(u, t_abs, rel_tol=1e-12, abs_tol=1e-12)]
        if not key_match:
            raise RangeError(f"absolute time {t_abs} not in the sampled grid {sample.grid.times}")
        for alpha in sample.grid.alphas:
            values[(alpha, t)] = 4.0 * N * sample.eigenvalues[(alpha, key_match[0])]
    return ScaledSample(N, values)


def batch_eigenvalues(
    N: int,
    alphas,
    times,
    seed: int,
    replicas: int,
    stream_base: int = 0,
    chunk: int = 128,
):
    """Spectra only, replicas stacked, SVDs batched per chunk.

    Returns ``{(alpha, t): array of shape (replicas, N)}`` with ascending
    eigenvalues per row.  Stream assignment matches :func:`iter_samples`, so
    the r-th row equals the r-th full sample's spectrum.
    """
    grid = FieldGrid(N, tuple(alphas), tuple(times))
    rows = N + grid.alpha_max
    out = {(a, t): np.empty((replicas, N)) for a in grid.alphas for t in grid.times}
    for lo in range(0, replicas, chunk):
        hi = min(lo + chunk, replicas)
        B = np.zeros((hi - lo, rows, N), dtype=complex)
        gens = [RngStream(seed, stream_base + r).generator() for r in range(lo, hi)]
        prev = 0.0
        for t in grid.times:
            std = math.sqrt((t - prev) / 2.0)
            for i, gen in enumerate(gens):
                B[i] += std * (
                    gen.standard_normal((rows, N)) + 1j * gen.standard_normal((rows, N))
                )
            prev = t
            for alpha in grid.alphas:
                sv = np.linalg.svd(B[:, : N + alpha, :], compute_uv=False)
                out[(alpha, t)][lo:hi] = np.sort(sv * sv, axis=1)
    return out
