"""Norming constants and the law of the normalized maximum N_n = (M_n - b_n)/a_n."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution, SupportInterval, _log1mexp, _ret
from .errors import DomainError, UnsupportedError
from .numerics import find_root

__all__ = [
    "NormingConstants",
    "NormalizedMax",
    "norming_constants",
    "normalized_max",
    "normalized_max_cdf",
    "normalized_max_score",
    "normalized_quantile",
]


@dataclass(frozen=True)
class NormingConstants:
    n: int
    a_n: float
    b_n: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("block size n must be >= 1")
        if not self.a_n > 0:
            raise DomainError(f"a_n must be > 0, got {self.a_n}")

    @classmethod
    def identity(cls, n: int) -> NormingConstants:
        """a = 1, b = 0: N_n is the raw maximum M_n."""
        return cls(n, 1.0, 0.0)


def norming_constants(dist: Distribution, n: int) -> NormingConstants:
    """(a_n, b_n) with 1 - F(b_n) = 1/n and a_n = g(b_n).

    Closed forms are used when the law registers them; otherwise b_n comes
    from the tail equation and a_n from the von Mises auxiliary function.
    """
    n = int(n)
    if n < 1:
        raise DomainError("block size n must be >= 1")
    closed = dist.norming(n)
    if closed is not None:
        a, b = closed
        return NormingConstants(n, float(a), float(b))
    spec = dist.von_mises
    if spec is None:
        raise UnsupportedError(f"{dist.name}: no von Mises representation and no closed-form norming")
    if n == 1:
        lower = dist.support.lower
        if not math.isfinite(lower):
            raise DomainError(f"{dist.name}: 1 - F(b) = 1 has no finite root; "
                              "use NormingConstants.identity(1)")
        return NormingConstants(1, float(spec.g(lower)), lower)
    if math.log(spec.c * n) < 0:
        raise DomainError(f"{dist.name}: log(c n) < 0, b_n would fall below z0 = {spec.z0}")
    log_n = math.log(n)
    f = lambda b: float(dist.log_sf(b)) + log_n
    lo = max(spec.z0, dist.support.lower)
    if math.isfinite(dist.support.upper):
        hi = dist.support.upper
    else:
        hi, step = lo + 1.0, 1.0
        while f(hi) > 0:
            step *= 2.0
            hi = lo + step
            if step > 1e15:
                raise DomainError(f"{dist.name}: tail never reaches 1/{n}")
    b = find_root(f, (lo, hi), tol=1e-13).root
    return NormingConstants(n, float(spec.g(b)), b)


class NormalizedMax(Distribution):
    """Law of (max(X_1..X_n) - b_n)/a_n, with cdf F(a x + b)^n."""

    def __init__(self, base: Distribution, norming: NormingConstants):
        self.base = base
        self.norming_constants = norming
        self.n = norming.n
        self.a = norming.a_n
        self.b = norming.b_n
        self.name = f"N_{self.n}[{base.name}]"
        lo = (base.support.lower - self.b) / self.a
        hi = (base.support.upper - self.b) / self.a
        self.support = SupportInterval(lo, hi)
        self._log_na = math.log(self.n * self.a)

    def _x(self, z):
        return self.a * np.asarray(z, dtype=float) + self.b

    def log_cdf(self, z):
        return _ret(z, self.n * np.asarray(self.base.log_cdf(self._x(z))))

    def log_sf(self, z):
        return _ret(z, _log1mexp(np.asarray(self.log_cdf(z))))

    def _log_pdf(self, z):
        x = self._x(z)
        lc = np.asarray(self.base.log_cdf(x))
        with np.errstate(invalid="ignore"):
            tail = np.where(self.n == 1, 0.0, (self.n - 1) * lc)
        return self._log_na + tail + np.asarray(self.base._log_pdf(x))

    def _closed_max_score(self, z):
        return self._log_na + np.asarray(self.base.max_score(self._x(z)))

    def quantile_log(self, log_u):
        return (np.asarray(self.base.quantile_log(np.asarray(log_u, dtype=float) / self.n)) - self.b) / self.a

    def norming(self, n):
        return None


def normalized_max(dist: Distribution, n: int, norming: NormingConstants | None = None) -> NormalizedMax:
    """N_n for ``dist`` using the theorem norming constants unless given."""
    return NormalizedMax(dist, norming if norming is not None else norming_constants(dist, n))


def normalized_max_cdf(nm: NormalizedMax, x):
    return nm.cdf(x)


def normalized_max_score(nm: NormalizedMax, z):
    """log(n a_n) + Theta_X(a_n z + b_n)."""
    return nm.max_score(z)


def normalized_quantile(nm: NormalizedMax, u):
    return nm.quantile(u)
