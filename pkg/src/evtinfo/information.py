"""Entropy and relative entropy to the Gumbel through the max-score.

All quantities are deterministic quadratures in quantile space. The
decomposition of D(N_n || Gumbel(0, 1)) splits the score bracket into

    (log g(b_n) - E log g(M_n)) + (log n - H_n) + 1/n + E N_n

and adds the moment-generating bracket E exp(-N_n) - 1.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .distributions import Distribution, GumbelParams, VonMisesSpec
from .errors import DomainError, UnsupportedError
from .normalize import NormalizedMax, NormingConstants
from .numerics import DEFAULT_TOL, expectation
from .specfun import EULER_GAMMA, gamma_derivative_at_1, harmonic

__all__ = [
    "KlDecomposition",
    "entropy_via_score",
    "entropy_direct",
    "kl_to_gumbel",
    "kl_direct",
    "kl_decomposition",
    "expected_log_cdf_at_max",
    "expected_log_tail_at_max",
    "mgf",
    "moment",
    "limiting_moment",
    "taylor_terms",
    "taylor_gap",
    "GUMBEL_ENTROPY",
]

GUMBEL_ENTROPY = 1.0 + EULER_GAMMA
STANDARD = GumbelParams(0.0, 1.0)


@dataclass(frozen=True)
class KlDecomposition:
    score_gap: float
    harmonic_gap: float
    inv_n: float
    mean_term: float
    mgf_bracket: float
    total: float

    @property
    def score_bracket(self) -> float:
        """E Theta_N(N) + E N, the first bracket of the relative entropy."""
        return math.fsum([self.score_gap, self.harmonic_gap, self.inv_n, self.mean_term])

    def as_dict(self) -> dict:
        return asdict(self)


def _E(dist, h, tol):
    return expectation(dist, h, tol=tol).value


def entropy_via_score(dist: Distribution, tol: float = DEFAULT_TOL) -> float:
    """H(X) = 1 - E Theta(X)."""
    return 1.0 - _E(dist, dist.max_score, tol)


def entropy_direct(dist: Distribution, tol: float = DEFAULT_TOL) -> float:
    """H(X) = -E log f(X)."""
    return -_E(dist, dist.log_pdf, tol)


def kl_to_gumbel(dist: Distribution, target: GumbelParams = STANDARD,
                 tol: float = DEFAULT_TOL) -> float:
    """D(X || Gumbel(mu, beta)) assembled from the score and MGF brackets."""
    mu, beta = target.mu, target.beta
    e_score = _E(dist, dist.max_score, tol)
    e_x = _E(dist, lambda x: x, tol)
    e_exp = _E(dist, lambda x: np.exp(-(x - mu) / beta), tol)
    score_bracket = e_score + math.log(beta) + (e_x - mu) / beta
    return score_bracket + (e_exp - 1.0)


def kl_direct(dist: Distribution, target: GumbelParams = STANDARD,
              tol: float = DEFAULT_TOL) -> float:
    """D(X || Gumbel) as E[log f_X(X) - log f_Y(X)], independent of the score."""
    mu, beta = target.mu, target.beta

    def integrand(x):
        z = (x - mu) / beta
        log_fy = -math.log(beta) - z - np.exp(-z)
        return np.asarray(dist.log_pdf(x)) - log_fy

    return _E(dist, integrand, tol)


def expected_log_cdf_at_max(dist: Distribution, n: int, tol: float = DEFAULT_TOL) -> float:
    """E log F(M_n); equals -1/n for every continuous law."""
    m = NormalizedMax(dist, NormingConstants.identity(n))
    return _E(m, dist.log_cdf, tol)


def expected_log_tail_at_max(dist: Distribution, n: int, tol: float = DEFAULT_TOL) -> float:
    """-E log(1 - F(M_n)); equals H_n for every continuous law."""
    m = NormalizedMax(dist, NormingConstants.identity(n))
    return -_E(m, dist.log_sf, tol)


def mgf(dist: Distribution, t: float, tol: float = DEFAULT_TOL) -> float:
    if t == 0:
        return 1.0
    return _E(dist, lambda x: np.exp(t * x), tol)


def moment(dist: Distribution, k: int, tol: float = DEFAULT_TOL) -> float:
    """E X^k by quadrature; relative tolerance guards large high moments."""
    if k < 0:
        raise DomainError("moment order must be >= 0")
    if k == 0:
        return 1.0
    return expectation(dist, lambda x: x ** k, tol=tol, rel_tol=1e-12).value


def limiting_moment(k: int) -> float:
    """lim E N_n^k = (-1)^k Gamma^(k)(1), the k-th moment of the standard Gumbel."""
    return (-1) ** k * gamma_derivative_at_1(k)


def _require_spec(nm: NormalizedMax) -> VonMisesSpec:
    if not isinstance(nm, NormalizedMax):
        raise TypeError("expected a NormalizedMax")
    spec = nm.base.von_mises
    if spec is None:
        raise UnsupportedError(f"{nm.base.name}: decomposition needs a von Mises auxiliary function")
    return spec


def kl_decomposition(nm: NormalizedMax, target: GumbelParams = STANDARD,
                     tol: float = DEFAULT_TOL) -> KlDecomposition:
    """Split D(N_n || Gumbel(0, 1)) into its five additive terms."""
    if not target.is_standard:
        raise UnsupportedError("the decomposition is only defined for the standard Gumbel target")
    spec = _require_spec(nm)
    n, a, b = nm.n, nm.a, nm.b
    log_g_b = float(spec.log_g(b))
    e_log_g = _E(nm, lambda z: np.asarray(spec.log_g(a * z + b)), tol)
    score_gap = log_g_b - e_log_g
    harmonic_gap = math.log(n) - harmonic(n)
    inv_n = 1.0 / n
    mean_term = _E(nm, lambda z: z, tol)
    mgf_bracket = _E(nm, lambda z: np.exp(-z), tol) - 1.0
    total = math.fsum([score_gap, harmonic_gap, inv_n, mean_term, mgf_bracket])
    return KlDecomposition(score_gap, harmonic_gap, inv_n, mean_term, mgf_bracket, total)


def taylor_terms(spec: VonMisesSpec, nm: NormalizedMax, K: int,
                 tol: float = DEFAULT_TOL) -> list[float]:
    """Per-order terms psi^(k)(b_n) g(b_n)^k / k! * E N_n^k, k = 1..K."""
    if K < 1:
        raise DomainError("Taylor order K must be >= 1")
    terms = []
    for k in range(1, K + 1):
        coef = spec.coefficient(k, nm.b)
        terms.append(0.0 if coef == 0.0 else coef * moment(nm, k, tol))
    return terms


def taylor_gap(spec: VonMisesSpec, nm: NormalizedMax, K: int, tol: float = DEFAULT_TOL) -> float:
    """Order-K Taylor approximation of E log g(M_n) - log g(b_n)."""
    return math.fsum(taylor_terms(spec, nm, K, tol))
