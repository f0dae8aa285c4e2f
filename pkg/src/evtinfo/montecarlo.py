"""Seeded, chunked Monte Carlo sampling and plug-in estimators.

The index space of a run is cut into fixed blocks of ``CHUNK`` samples.
Block ``j`` of stream ``(seed, stream_id)`` draws from a Philox generator
keyed by ``SeedSequence(seed, spawn_key=(stream_id, j))``, so the output is
a function of (seed, stream_id, count) only, whatever the worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import Distribution, GumbelParams
from .errors import DomainError, EstimationError
from .normalize import NormalizedMax

__all__ = [
    "CHUNK",
    "GENERATOR",
    "SeededStream",
    "EstimateWithCI",
    "uniforms",
    "sample",
    "sample_normalized_max",
    "estimate",
    "entropy_estimate",
    "kl_estimate",
    "metadata",
]

CHUNK = 1 << 16
GENERATOR = "numpy.random.Philox (SeedSequence spawn_key=(stream_id, block))"
_SCALE = 2.0 ** -53


@dataclass(frozen=True)
class SeededStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned value")
        if self.stream_id < 0:
            raise DomainError("stream_id must be >= 0")

    def block_generator(self, block: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, block))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class EstimateWithCI:
    mean: float
    std_error: float
    n_samples: int

    def within(self, value: float, k: float = 3.0) -> bool:
        return abs(self.mean - value) <= k * self.std_error


def _block_uniforms(stream: SeededStream, block: int, size: int) -> np.ndarray:
    # open interval (0, 1): (k + 1/2) 2^-53
    k = stream.block_generator(block).integers(0, 1 << 53, size=size, dtype=np.int64)
    return (k.astype(float) + 0.5) * _SCALE


def _run_blocks(fn: Callable[[int, int], np.ndarray], count: int, workers: int) -> np.ndarray:
    sizes = [min(CHUNK, count - j * CHUNK) for j in range(math.ceil(count / CHUNK))]
    if workers <= 1 or len(sizes) == 1:
        parts = [fn(j, s) for j, s in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, range(len(sizes)), sizes))
    return np.concatenate(parts)


def uniforms(stream: SeededStream, count: int, workers: int = 1) -> np.ndarray:
    if count < 1:
        raise DomainError("count must be >= 1")
    return _run_blocks(lambda j, s: _block_uniforms(stream, j, s), count, workers)


def sample(dist: Distribution, stream: SeededStream, count: int, workers: int = 1) -> np.ndarray:
    """Inverse-transform draws quantile(u)."""
    if count < 1:
        raise DomainError("count must be >= 1")
    return _run_blocks(lambda j, s: np.asarray(dist.quantile(_block_uniforms(stream, j, s))),
                       count, workers)


def sample_normalized_max(nm: NormalizedMax, stream: SeededStream, count: int,
                          workers: int = 1, max_of_n: bool = False) -> np.ndarray:
    """Draws of N_n, one uniform each: (Q(u^(1/n)) - b)/a.

    ``max_of_n=True`` takes the literal maximum of n base draws instead; it
    is slower and serves only as a self-check.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    if not max_of_n:
        return sample(nm, stream, count, workers)
    n, base = nm.n, nm.base

    def block(j, s):
        u = _block_uniforms(stream, j, s * n).reshape(s, n)
        m = np.asarray(base.quantile(u)).max(axis=1)
        return (m - nm.b) / nm.a

    return _run_blocks(block, count, workers)


def estimate(target: Distribution, h: Callable, stream: SeededStream, count: int,
             workers: int = 1, draws: np.ndarray | None = None) -> EstimateWithCI:
    """Plug-in mean of h(X) with its standard error."""
    if count < 2:
        raise DomainError("need at least 2 samples for a standard error")
    x = draws if draws is not None else sample(target, stream, count, workers)
    with np.errstate(all="ignore"):
        y = np.asarray(h(x), dtype=float)
    bad = np.flatnonzero(~np.isfinite(y))
    if bad.size:
        i = int(bad[0])
        raise EstimationError(f"h is not finite at sample {i} (x = {x[i]!r})", index=i)
    return EstimateWithCI(float(np.mean(y)), float(np.std(y, ddof=1) / math.sqrt(len(y))), len(y))


def entropy_estimate(dist: Distribution, stream: SeededStream, count: int,
                     workers: int = 1) -> EstimateWithCI:
    """1 - mean Theta(X)."""
    est = estimate(dist, dist.max_score, stream, count, workers)
    return EstimateWithCI(1.0 - est.mean, est.std_error, est.n_samples)


def kl_estimate(dist: Distribution, stream: SeededStream, count: int,
                target: GumbelParams = GumbelParams(), workers: int = 1) -> EstimateWithCI:
    """Mean of Theta(X) + log beta + (X - mu)/beta + exp(-(X - mu)/beta) - 1."""
    mu, beta = target.mu, target.beta

    def h(x):
        z = (x - mu) / beta
        return np.asarray(dist.max_score(x)) + math.log(beta) + z + np.expm1(-z)

    return estimate(dist, h, stream, count, workers)


def metadata(stream: SeededStream, count: int | None = None) -> dict:
    meta = {"generator": GENERATOR, "seed": stream.seed, "stream_id": stream.stream_id,
            "chunk_size": CHUNK}
    if count is not None:
        meta["samples"] = count
    return meta
