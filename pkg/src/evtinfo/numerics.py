"""Adaptive quadrature on the unit interval and bracketed scalar root finding.

Every expectation in the package is evaluated in quantile space,

    E h(X) = int_0^1 h(Q(u)) du,

so a single globally adaptive Gauss-Kronrod (7, 15) rule over (0, 1) serves
all distributions regardless of how their support looks.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np

from .errors import BracketError, BudgetError, DivergenceError, EvaluationError

if TYPE_CHECKING:
    from .distributions import Distribution

__all__ = [
    "DEFAULT_TOL",
    "MAX_PANELS",
    "ENDPOINT_EPS",
    "QuadratureResult",
    "RootResult",
    "integrate_unit",
    "integrate",
    "expectation",
    "find_root",
]

DEFAULT_TOL = 1e-9
MAX_PANELS = 10_000
# Panels narrower than this are never split, so no node gets within
# rounding distance of 0 or 1.
ENDPOINT_EPS = np.finfo(float).eps ** 0.75
# error allowed on unrefinable panels, relative to max(1, |value|)
_FROZEN_REL = 1e-6

# Kronrod 15-point abscissae/weights on [-1, 1]; the Gauss 7-point rule uses
# every odd-indexed Kronrod node.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])          # ascending, 15 nodes
_KW = np.concatenate([_WK[:-1], _WK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[[9, 11, 13]] = _WG[2::-1]
_GW[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int

    def __float__(self) -> float:
        return self.root


def _panel(h: Callable, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    x = (a + b) * 0.5 + half * _NODES
    with np.errstate(all="ignore"):
        y = np.asarray(h(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    if np.isnan(y).any():
        raise EvaluationError(f"integrand returned NaN on panel [{a!r}, {b!r}]")
    if not np.isfinite(y).all():
        raise DivergenceError(f"integrand is infinite on panel [{a!r}, {b!r}]")
    k = half * float(np.dot(_KW, y))
    g = half * float(np.dot(_GW, y))
    return k, abs(k - g)


def integrate_unit(h: Callable, tol: float = DEFAULT_TOL, rel_tol: float = 0.0,
                   max_panels: int = MAX_PANELS) -> QuadratureResult:
    """Integrate a vectorised ``h`` over (0, 1).

    The panel with the largest error estimate is bisected until the summed
    estimate drops below ``max(tol, rel_tol*|value|)``. Integrable endpoint
    singularities (e.g. ``log u``) are fine: nodes are strictly interior and
    panels are not refined below ``ENDPOINT_EPS``.

    Raises DivergenceError (carrying the partial value) when the panel budget
    is exhausted or an unrefinable panel alone exceeds the tolerance.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    value, err = _panel(h, 0.0, 1.0)
    evaluations = 15
    # heap entries: (-error, seq, a, b, value); seq makes ordering deterministic
    heap = [(-err, 0, 0.0, 1.0, value)]
    frozen_value = frozen_err = 0.0
    seq = 1
    run_value, run_err = value, err
    while True:
        target = max(tol, rel_tol * abs(run_value))
        # unrefinable panels may only carry a small error; more means the
        # integrand is not integrable (or too singular) at an endpoint
        if frozen_err > max(target, _FROZEN_REL * max(1.0, abs(run_value))):
            raise DivergenceError(
                f"integrand not resolved at panel width {ENDPOINT_EPS:.2g} "
                f"(estimate {run_value!r}, error {frozen_err:.3g})",
                partial=run_value, error_estimate=run_err + frozen_err)
        if run_err <= target:
            # re-sum exactly; the running totals drift by rounding
            run_value = math.fsum([p[4] for p in heap] + [frozen_value])
            run_err = math.fsum([-p[0] for p in heap])
            if run_err <= max(tol, rel_tol * abs(run_value)):
                break
        if not heap or seq // 2 >= max_panels:
            raise DivergenceError(
                f"quadrature did not converge within {max_panels} panels "
                f"(estimate {run_value!r}, error {run_err:.3g})",
                partial=run_value, error_estimate=run_err + frozen_err)
        neg_err, _, a, b, v0 = heapq.heappop(heap)
        if b - a < ENDPOINT_EPS:
            frozen_value += v0
            frozen_err += -neg_err
            run_err += neg_err
            continue
        mid = 0.5 * (a + b)
        run_value -= v0
        run_err += neg_err
        for lo, hi in ((a, mid), (mid, b)):
            v, e = _panel(h, lo, hi)
            evaluations += 15
            run_value += v
            run_err += e
            heapq.heappush(heap, (-e, seq, lo, hi, v))
            seq += 1
    return QuadratureResult(value=run_value, error_estimate=run_err + frozen_err,
                            evaluations=evaluations)


def integrate(f: Callable, a: float, b: float, tol: float = DEFAULT_TOL,
              rel_tol: float = 0.0) -> QuadratureResult:
    """Integrate ``f`` over the finite interval [a, b] by mapping onto (0, 1)."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate needs finite limits")
    width = b - a
    if width == 0:
        return QuadratureResult(0.0, 0.0, 0)
    res = integrate_unit(lambda u: f(a + width * u), tol=tol / abs(width), rel_tol=rel_tol)
    return QuadratureResult(res.value * width, res.error_estimate * abs(width), res.evaluations)


def expectation(dist: Distribution, h: Callable, tol: float = DEFAULT_TOL,
                rel_tol: float = 0.0) -> QuadratureResult:
    """E h(X) computed as the integral of h(Q(u)) over (0, 1).

    ``h`` receives numpy arrays of quantile values; only the quantile of
    ``dist`` is evaluated.
    """
    return integrate_unit(lambda u: h(dist.quantile(u)), tol=tol, rel_tol=rel_tol)


def find_root(f: Callable[[float], float], bracket: tuple[float, float],
              tol: float = 1e-12, fprime: Callable[[float], float] | None = None,
              max_iter: int = 200) -> RootResult:
    """Root of a continuous monotone ``f`` inside ``bracket``.

    Newton steps (with ``fprime``) or secant steps are taken when they land
    strictly inside the current bracket and shrink it quickly enough;
    otherwise the step falls back to bisection. Stops once |f(x)| <= tol.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = float(f(lo)), float(f(hi))
    if math.isnan(flo) or math.isnan(fhi):
        raise EvaluationError("f is NaN at a bracket end")
    if flo == 0.0:
        return RootResult(lo, 0.0, 0)
    if fhi == 0.0:
        return RootResult(hi, 0.0, 0)
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"f({lo!r}) and f({hi!r}) have the same sign")
    if abs(flo) <= tol and math.isfinite(flo):
        return RootResult(lo, flo, 0)
    if abs(fhi) <= tol and math.isfinite(fhi):
        return RootResult(hi, fhi, 0)

    x, fx = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    x_prev, f_prev = None, None
    width_before = hi - lo
    for it in range(1, max_iter + 1):
        cand = None
        if math.isfinite(fx):
            if fprime is not None:
                d = float(fprime(x))
                if d != 0 and math.isfinite(d):
                    cand = x - fx / d
            elif x_prev is not None and math.isfinite(f_prev) and f_prev != fx:
                cand = x - fx * (x - x_prev) / (fx - f_prev)
        # force a bisection when the last two steps failed to halve the bracket
        if it % 3 == 0 and (hi - lo) > 0.5 * width_before:
            cand = None
        if it % 3 == 0:
            width_before = hi - lo
        if cand is None or not (lo < cand < hi):
            cand = lo + 0.5 * (hi - lo)
        if cand == lo or cand == hi:
            break
        fc = float(f(cand))
        if math.isnan(fc):
            raise EvaluationError(f"f is NaN at {cand!r}")
        x_prev, f_prev = x, fx
        x, fx = cand, fc
        if fc == 0.0 or abs(fc) <= tol:
            return RootResult(x, fc, it)
        if (fc > 0) == (flo > 0):
            lo, flo = cand, fc
        else:
            hi, fhi = cand, fc
    best, fbest = min(((lo, flo), (hi, fhi)), key=lambda p: abs(p[1]))
    if abs(fbest) <= tol:
        return RootResult(best, fbest, max_iter)
    raise BudgetError(f"root not found to |f| <= {tol:g} in {max_iter} iterations "
                      f"(bracket [{lo!r}, {hi!r}], |f| = {abs(fbest):.3g})")
