"""Continuous laws with max-score, hazard and von Mises structure.

A law is described by four log-space primitives (``log_cdf``, ``log_sf``,
``log_pdf``, ``quantile_log``) from which everything else is derived. All
methods accept scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DivergenceError, DomainError, UnsupportedError
from .numerics import find_root, integrate

__all__ = [
    "SupportInterval",
    "GumbelParams",
    "VonMisesSpec",
    "Distribution",
    "Exponential",
    "Gumbel",
    "Gnedenko",
    "VonMises",
    "make_exponential",
    "make_gumbel",
    "make_gnedenko",
    "make_von_mises",
    "max_score",
    "max_score_vonmises",
    "hazard",
    "cdf_from_score",
]


# log of the smallest positive double; below this F(x) underflows
_LOG_TINY = math.log(np.finfo(float).smallest_subnormal)


def _ret(x, r):
    return float(r) if np.ndim(x) == 0 else r


def _log1mexp(a):
    """log(1 - exp(a)) for a <= 0."""
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a > -math.log(2), np.log(-np.expm1(a)), np.log1p(-np.exp(a)))


@dataclass(frozen=True)
class SupportInterval:
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DomainError(f"empty support ({self.lower}, {self.upper})")

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x > self.lower) & (x < self.upper)


@dataclass(frozen=True)
class GumbelParams:
    mu: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"Gumbel scale beta must be > 0, got {self.beta}")

    @property
    def is_standard(self) -> bool:
        return self.mu == 0.0 and self.beta == 1.0


@dataclass(frozen=True, eq=False)
class VonMisesSpec:
    """Tail representation F(x) = 1 - c exp(-G(x)), G(x) = int_{z0}^x du/g(u).

    ``big_g`` is an optional closed form of G; without it G is integrated
    from z0. ``log_g_derivative(k, u)`` returns the k-th derivative of log g
    and ``taylor_coefficient(k, b)`` may override psi^(k)(b) g(b)^k / k!.
    """

    c: float
    z0: float
    x0: float
    g: Callable
    big_g: Optional[Callable] = None
    g_derivative: Optional[Callable] = None
    log_g_derivative: Optional[Callable[[int, float], float]] = None
    taylor_coefficient: Optional[Callable[[int, float], float]] = None
    name: str = "von-mises"
    _g_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"von Mises constant c must be > 0, got {self.c}")
        if not self.z0 < self.x0:
            raise DomainError("need z0 < x0")

    def log_g(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.g(x))

    def G(self, x):
        """Cumulative G(x); vectorised."""
        if self.big_g is not None:
            return self.big_g(x)
        arr = np.asarray(x, dtype=float)
        out = np.array([self._G_scalar(float(v)) for v in arr.ravel()]).reshape(arr.shape)
        return _ret(x, out)

    def _G_scalar(self, x: float) -> float:
        if x == self.z0:
            return 0.0
        if x >= self.x0:
            return math.inf
        cached = self._g_cache.get(x)
        if cached is not None:
            return cached
        res = integrate(lambda u: 1.0 / self.g(u), self.z0, x, tol=1e-13, rel_tol=1e-14)
        if len(self._g_cache) < 100_000:
            self._g_cache[x] = res.value
        return res.value

    def psi_derivative(self, k: int, u: float) -> float:
        if self.log_g_derivative is None:
            raise UnsupportedError(f"{self.name}: no derivatives of log g supplied")
        return float(self.log_g_derivative(k, u))

    def coefficient(self, k: int, b: float) -> float:
        """psi^(k)(b) g(b)^k / k!, the weight of E N^k in the Taylor gap."""
        if self.taylor_coefficient is not None:
            return float(self.taylor_coefficient(k, b))
        return self.psi_derivative(k, b) * float(self.g(b)) ** k / math.factorial(k)


class Distribution:
    """Base class for a continuous scalar law.

    Subclasses implement ``log_cdf``, ``log_sf``, ``log_pdf`` (interior
    points only) and ``quantile_log``; ``support`` and ``von_mises`` are
    attributes.
    """

    name = "distribution"
    support: SupportInterval = SupportInterval()
    von_mises: Optional[VonMisesSpec] = None

    # --- primitives ------------------------------------------------------
    def log_cdf(self, x):
        raise NotImplementedError

    def log_sf(self, x):
        raise NotImplementedError

    def _log_pdf(self, x):
        raise NotImplementedError

    def quantile_log(self, log_u):
        """Quantile at u = exp(log_u); lets maxima pass log(u)/n losslessly."""
        raise NotImplementedError

    def norming(self, n: int) -> Optional[tuple[float, float]]:
        """Closed-form (a_n, b_n) if the law has them, else None."""
        return None

    # --- derived ---------------------------------------------------------
    def _interior(self, x):
        x = np.asarray(x, dtype=float)
        if not self.support.contains(x).all():
            bad = x[~self.support.contains(x)] if x.ndim else x
            raise DomainError(f"{self.name}: point(s) {np.ravel(bad)[:3]} outside the support "
                              f"interior ({self.support.lower}, {self.support.upper})")
        return x

    def log_pdf(self, x):
        return self._log_pdf(self._interior(x)) if np.ndim(x) else float(self._log_pdf(self._interior(x)))

    def cdf(self, x):
        return _ret(x, np.exp(self.log_cdf(x)))

    def sf(self, x):
        return _ret(x, np.exp(self.log_sf(x)))

    def pdf(self, x):
        return _ret(x, np.exp(self.log_pdf(x)))

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if ((u <= 0) | (u >= 1)).any():
            raise DomainError("quantile needs u in (0, 1)")
        return _ret(u, self.quantile_log(np.log(u)))

    def w(self, x):
        """w(x) = -log F(x), so that F = exp(-w)."""
        return _ret(x, -np.asarray(self.log_cdf(x)))

    def _closed_max_score(self, x):
        return None

    def max_score(self, x):
        """log(f(x)/F(x)); DomainError where F underflows to 0."""
        xi = self._interior(x)
        closed = self._closed_max_score(xi)
        lc = np.asarray(self.log_cdf(xi))
        if (lc < _LOG_TINY).any():
            raise DomainError(f"{self.name}: cdf underflows to 0, max-score undefined")
        if closed is None:
            closed = np.asarray(self._log_pdf(xi)) - lc
        return _ret(x, closed)

    def hazard(self, x):
        xi = self._interior(x)
        ls = np.asarray(self.log_sf(xi))
        if np.isneginf(ls).any():
            raise DomainError(f"{self.name}: F(x) = 1, hazard undefined")
        return _ret(x, np.exp(np.asarray(self._log_pdf(xi)) - ls))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class Exponential(Distribution):
    def __init__(self, lam: float = 1.0):
        if not lam > 0:
            raise DomainError(f"exponential rate must be > 0, got {lam}")
        self.lam = float(lam)
        self.name = f"exponential(lambda={self.lam:g})"
        self.support = SupportInterval(0.0, math.inf)
        lam = self.lam
        self.von_mises = VonMisesSpec(
            c=1.0, z0=0.0, x0=math.inf,
            g=lambda u: np.full_like(np.asarray(u, dtype=float), 1.0 / lam),
            big_g=lambda x: lam * np.asarray(x, dtype=float),
            g_derivative=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
            log_g_derivative=lambda k, u: 0.0,
            taylor_coefficient=lambda k, b: 0.0,
            name="exponential")

    def log_cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            r = np.where(x > 0, np.log(-np.expm1(-self.lam * np.maximum(x, 0))), -np.inf)
        return _ret(x, r)

    def log_sf(self, x):
        x = np.asarray(x, dtype=float)
        return _ret(x, -self.lam * np.maximum(x, 0.0))

    def _log_pdf(self, x):
        return math.log(self.lam) - self.lam * x

    def _closed_max_score(self, x):
        with np.errstate(divide="ignore"):
            return math.log(self.lam) - self.lam * x - np.log(-np.expm1(-self.lam * x))

    def quantile_log(self, log_u):
        with np.errstate(divide="ignore"):
            return -np.log(-np.expm1(log_u)) / self.lam

    def norming(self, n):
        return 1.0 / self.lam, math.log(n) / self.lam


class Gumbel(Distribution):
    """Gumbel(mu, beta), F(y) = exp(-exp(-(y - mu)/beta))."""

    def __init__(self, params: GumbelParams = GumbelParams()):
        self.params = params
        mu, beta = params.mu, params.beta
        self.name = f"gumbel(mu={mu:g}, beta={beta:g})"
        self.support = SupportInterval()
        # exact representation with c = 1 - F(mu), g = 1/hazard
        c = -math.expm1(-1.0)
        self.von_mises = VonMisesSpec(
            c=c, z0=mu, x0=math.inf,
            g=lambda u: np.exp(np.asarray(self.log_sf(u)) - np.asarray(self._log_pdf(np.asarray(u, float)))),
            big_g=lambda x: math.log(c) - np.asarray(self.log_sf(x)),
            name="gumbel")

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.params.mu) / self.params.beta

    def log_cdf(self, x):
        return _ret(x, -np.exp(-self._z(x)))

    def log_sf(self, x):
        return _ret(x, _log1mexp(-np.exp(-self._z(x))))

    def _log_pdf(self, x):
        z = self._z(x)
        return -math.log(self.params.beta) - z - np.exp(-z)

    def _closed_max_score(self, x):
        return -math.log(self.params.beta) - self._z(x)

    def quantile_log(self, log_u):
        return self.params.mu - self.params.beta * np.log(-np.asarray(log_u, dtype=float))

    def mean(self) -> float:
        from .specfun import EULER_GAMMA
        return self.params.mu + self.params.beta * EULER_GAMMA

    def entropy(self) -> float:
        from .specfun import EULER_GAMMA
        return 1.0 + math.log(self.params.beta) + EULER_GAMMA

    def norming(self, n):
        if n < 2:
            return None
        b = float(self.quantile_log(math.log1p(-1.0 / n)))
        return float(self.von_mises.g(b)), b


def _gnedenko_coefficient(k: int, b: float) -> float:
    # psi^(k)(b) g(b)^k / k! = -2 (1 - b)^k / k
    return -2.0 * (1.0 - b) ** k / k


class Gnedenko(Distribution):
    """F(x) = 1 - exp(-x/(1-x)) on (0, 1); g(u) = (1-u)^2."""

    def __init__(self):
        self.name = "gnedenko"
        self.support = SupportInterval(0.0, 1.0)
        self.von_mises = VonMisesSpec(
            c=1.0, z0=0.0, x0=1.0,
            g=lambda u: (1.0 - np.asarray(u, dtype=float)) ** 2,
            big_g=self._s,
            g_derivative=lambda u: -2.0 * (1.0 - np.asarray(u, dtype=float)),
            log_g_derivative=lambda k, u: -2.0 * math.factorial(k - 1) / (1.0 - u) ** k,
            taylor_coefficient=_gnedenko_coefficient,
            name="gnedenko")

    @staticmethod
    def _s(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(x >= 1, np.inf, x / (1.0 - np.minimum(x, 1.0)))

    def log_cdf(self, x):
        x = np.asarray(x, dtype=float)
        s = self._s(np.clip(x, 0.0, 1.0))
        with np.errstate(divide="ignore"):
            r = np.where(x <= 0, -np.inf, np.log(-np.expm1(-s)))
        return _ret(x, r)

    def log_sf(self, x):
        x = np.asarray(x, dtype=float)
        return _ret(x, -self._s(np.clip(x, 0.0, 1.0)))

    def _log_pdf(self, x):
        return -self._s(x) - 2.0 * np.log1p(-x)

    def _closed_max_score(self, x):
        s = self._s(x)
        with np.errstate(divide="ignore"):
            return -s - 2.0 * np.log1p(-x) - np.log(-np.expm1(-s))

    def quantile_log(self, log_u):
        with np.errstate(divide="ignore"):
            s = -np.log(-np.expm1(log_u))
        return s / (1.0 + s)

    def norming(self, n):
        L = math.log(n)
        b = L / (1.0 + L)
        return (1.0 - b) ** 2, b


class VonMises(Distribution):
    """Law defined directly by a VonMisesSpec (g given, G by quadrature)."""

    def __init__(self, spec: VonMisesSpec, lower: Optional[float] = None,
                 name: Optional[str] = None):
        self.von_mises = spec
        self.name = name or spec.name
        self._qcache: dict[float, float] = {}
        log_c = math.log(spec.c)
        if lower is None:
            lower = spec.z0 if log_c == 0.0 else self._solve_G(log_c, spec.z0 - 1.0 if log_c < 0 else spec.z0)
        self.support = SupportInterval(lower, spec.x0)
        self._validate()

    def _solve_G(self, target: float, start: float) -> float:
        """x with G(x) = target, searching outward from ``start``."""
        spec = self.von_mises
        f = lambda x: float(spec.G(x)) - target
        fp = lambda x: 1.0 / float(spec.g(x))
        lo = start
        step = 1.0
        while f(lo) > 0:
            lo -= step
            step *= 2
            if step > 1e300:
                raise DomainError(f"{self.name}: G never reaches {target}")
        if math.isinf(spec.x0):
            hi, step = lo + 1.0, 1.0
            while f(hi) < 0:
                hi += step
                step *= 2
                if step > 1e300:
                    raise DomainError(f"{self.name}: G never reaches {target}")
        else:
            # approach x0 geometrically; G blows up there
            gap = spec.x0 - lo
            hi = spec.x0 - 0.5 * gap
            while f(hi) < 0:
                gap *= 0.5
                hi = spec.x0 - 0.5 * gap
                if hi >= spec.x0 or gap < 1e-300:
                    return math.nextafter(spec.x0, -math.inf)
        return find_root(f, (lo, hi), tol=1e-13 * max(1.0, abs(target)), fprime=fp).root

    def _validate(self):
        lo, hi = self.support.lower, self.support.upper
        a = lo if math.isfinite(lo) else self.von_mises.z0 - 10.0
        b = hi if math.isfinite(hi) else self.von_mises.z0 + 10.0
        grid = np.linspace(a, b, 66)[1:-1]
        g = np.asarray(self.von_mises.g(grid), dtype=float)
        if not (np.isfinite(g).all() and (g > 0).all()):
            raise DomainError(f"{self.name}: g must be positive and finite on the support")
        F = self.cdf(grid)
        if not ((F >= 0) & (F <= 1)).all() or (np.diff(F) < 0).any():
            raise DomainError(f"{self.name}: representation does not give a cdf on the support")

    def log_sf(self, x):
        x = np.asarray(x, dtype=float)
        spec = self.von_mises
        xc = np.clip(x, self.support.lower, self.support.upper)
        r = math.log(spec.c) - np.asarray(spec.G(xc), dtype=float)
        return _ret(x, np.minimum(r, 0.0))

    def log_cdf(self, x):
        return _ret(x, _log1mexp(np.asarray(self.log_sf(x))))

    def _log_pdf(self, x):
        return np.asarray(self.log_sf(x)) - np.asarray(self.von_mises.log_g(x))

    def quantile_log(self, log_u):
        log_u = np.asarray(log_u, dtype=float)
        targets = math.log(self.von_mises.c) - _log1mexp(log_u)
        out = np.array([self._quantile_scalar(float(t)) for t in np.ravel(targets)])
        return _ret(log_u, out.reshape(log_u.shape))

    def _quantile_scalar(self, target: float) -> float:
        cached = self._qcache.get(target)
        if cached is None:
            cached = self._solve_G(target, self.von_mises.z0)
            if len(self._qcache) < 100_000:
                self._qcache[target] = cached
        return cached


def make_exponential(lam: float = 1.0) -> Exponential:
    return Exponential(lam)


def make_gumbel(params: GumbelParams | None = None, mu: float = 0.0, beta: float = 1.0) -> Gumbel:
    return Gumbel(params if params is not None else GumbelParams(mu, beta))


def make_gnedenko() -> Gnedenko:
    return Gnedenko()


def make_von_mises(spec: VonMisesSpec, lower: Optional[float] = None) -> VonMises:
    return VonMises(spec, lower=lower)


# --- module-level operations ----------------------------------------------

def max_score(dist: Distribution, x):
    """Max-score log(f(x)/F(x))."""
    return dist.max_score(x)


def max_score_vonmises(spec: VonMisesSpec, dist: Distribution, x):
    """Max-score through the tail representation: -log g + log(1-F) - log F."""
    xi = dist._interior(x)
    ls = np.asarray(dist.log_sf(xi))
    lc = np.asarray(dist.log_cdf(xi))
    if np.isneginf(ls).any():
        raise DomainError("F(x) = 1: log(1 - F) undefined")
    if np.isneginf(lc).any():
        raise DomainError("F(x) = 0: max-score undefined")
    return _ret(x, -np.asarray(spec.log_g(xi)) + ls - lc)


def hazard(dist: Distribution, x):
    return dist.hazard(x)


def cdf_from_score(theta: Callable, x: float, tail_budget: float = 1e4,
                   upper: float = math.inf, tail_tol: float = 1e-12) -> float:
    """Rebuild F(x) = exp(-int_x^upper exp(theta(u)) du) from a max-score.

    For an infinite upper end the tail is integrated in doubling chunks until
    a chunk contributes less than ``tail_tol``; reaching ``x + tail_budget``
    first raises DivergenceError.
    """
    h = lambda u: np.exp(theta(u))
    if math.isfinite(upper):
        if x >= upper:
            return 1.0
        total = integrate(h, x, upper, tol=1e-13, rel_tol=1e-13).value
        return math.exp(-total)
    parts = []
    lo, width = x, 1.0
    while True:
        hi = lo + width
        piece = integrate(h, lo, hi, tol=1e-14, rel_tol=1e-13).value
        parts.append(piece)
        if piece < tail_tol and width >= 1.0:
            break
        if hi - x > tail_budget:
            raise DivergenceError(f"tail integral of exp(theta) not settled by x + {tail_budget:g}",
                                  partial=math.fsum(parts))
        lo, width = hi, width * 2.0
    return math.exp(-math.fsum(parts))
