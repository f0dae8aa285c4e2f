"""Gamma function, its derivatives at 1, harmonic numbers and Euler's constant."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, UnsupportedError

__all__ = [
    "EULER_GAMMA",
    "HarmonicTable",
    "euler_gamma",
    "harmonic",
    "harmonic_table",
    "gamma_fn",
    "polygamma_at_1",
    "gamma_derivative_at_1",
    "MAX_GAMMA_DERIVATIVE",
]

EULER_GAMMA = 0.5772156649015329
MAX_GAMMA_DERIVATIVE = 8

# zeta(m) for m = 2..9
_ZETA = {
    2: 1.6449340668482264,
    3: 1.2020569031595943,
    4: 1.0823232337111382,
    5: 1.0369277551433699,
    6: 1.0173430619844491,
    7: 1.0083492773819228,
    8: 1.0040773561979443,
    9: 1.0020083928260822,
}


def euler_gamma() -> float:
    return EULER_GAMMA


@lru_cache(maxsize=512)
def harmonic(n: int) -> float:
    """n-th harmonic number, summed smallest term first (exactly rounded)."""
    n = int(n)
    if n < 1:
        raise DomainError("harmonic number needs n >= 1")
    return math.fsum(1.0 / i for i in range(n, 0, -1))


@dataclass(frozen=True)
class HarmonicTable:
    """Harmonic numbers H_1..H_N; ``table[n]`` returns H_n."""

    values: np.ndarray

    def __getitem__(self, n: int) -> float:
        if n < 1 or n > len(self.values):
            raise DomainError(f"table covers 1..{len(self.values)}, asked for {n}")
        return float(self.values[n - 1])

    def __len__(self) -> int:
        return len(self.values)


def harmonic_table(n_max: int) -> HarmonicTable:
    if n_max < 1:
        raise DomainError("harmonic table needs n_max >= 1")
    values = np.cumsum(1.0 / np.arange(1, n_max + 1, dtype=float))
    values.setflags(write=False)
    return HarmonicTable(values)


def gamma_fn(x: float) -> float:
    """Gamma function for x > 0."""
    if not x > 0:
        raise DomainError(f"gamma_fn is only defined here for x > 0, got {x!r}")
    return math.gamma(x)


def polygamma_at_1(m: int) -> float:
    """psi^(m)(1): -gamma for m = 0, (-1)^(m+1) m! zeta(m+1) otherwise."""
    if m == 0:
        return -EULER_GAMMA
    if m + 1 not in _ZETA:
        raise UnsupportedError(f"polygamma order {m} beyond tabulated zeta values")
    return (-1) ** (m + 1) * math.factorial(m) * _ZETA[m + 1]


@lru_cache(maxsize=None)
def gamma_derivative_at_1(k: int) -> float:
    """Gamma^(k)(1) for 0 <= k <= 8.

    Differentiating Gamma' = Gamma * psi gives
    Gamma^(k+1) = sum_j C(k, j) Gamma^(k-j) psi^(j).
    """
    if k < 0:
        raise DomainError("derivative order must be non-negative")
    if k > MAX_GAMMA_DERIVATIVE:
        raise UnsupportedError(f"Gamma^(k)(1) supported for k <= {MAX_GAMMA_DERIVATIVE}")
    if k == 0:
        return 1.0
    return math.fsum(math.comb(k - 1, j) * gamma_derivative_at_1(k - 1 - j) * polygamma_at_1(j)
                     for j in range(k))
