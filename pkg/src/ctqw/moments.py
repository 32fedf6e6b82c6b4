"""Moments ``<k^q>(t) = sum_k k^q |q_k(t)|^2`` and spreading exponents.

Closed forms come from symbolic expansion:

* Hermite: ``|q_k|^2`` is Poisson with mean ``u = (s t)^2``, so
  ``<k^q> = exp(-u) (u d/du)^q exp(u)`` (Touchard polynomials).
* Laguerre: ``|q_k|^2`` is negative binomial with
  ``y = (a s t)^2 / (1 + (a s t)^2)``, so
  ``<k^q> = (1-y)^(g+1) (y d/dy)^q (1-y)^-(g+1)``.
* Line: signed sites with weight 2 on ``|k| >= 1``, so ``<k^q> = 0`` for odd
  ``q`` and ``2 sum_{k in Z} k^q J_k(z)^2`` with ``z = 2 s t`` for even
  ``q >= 2``, which gives ``<k^2> = t^2`` at the default scale.  The Bessel
  sum is ``(1/2pi) int |d^r/dth^r exp(-i z cos th)|^2 dth`` with ``q = 2r``.
  In stratum form it is twice ``sum_k k^q |q_k|^2``; ``q = 0`` stays 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp
from scipy.stats import linregress

from .amplitudes import AmplitudeSeries
from .errors import InputError, InsufficientSpan, NoClosedForm, TailMassExceeded, UnsupportedMomentOrder
from .families import FamilyKind, FamilySpec

__all__ = [
    "MomentReport",
    "moments_from_series",
    "closed_moments",
    "sigma",
    "fit_exponent",
    "moment_report",
    "MAX_CLOSED_ORDER",
]

MAX_CLOSED_ORDER = 4


def moments_from_series(series: AmplitudeSeries, q: int, line_convention: bool = False,
                        tail_tol: float = 1e-8) -> np.ndarray:
    """``<k^q>`` at each time of ``series``.

    The series must carry (almost) all of the probability: a missing mass
    ``1 - sum_k |q_k|^2`` or a reported tail above ``tail_tol`` raises
    :class:`TailMassExceeded`.  ``line_convention`` reads strata as signed
    sites with weight 2 on ``|k| >= 1``: odd orders vanish and even orders
    ``q >= 2`` are doubled.
    """
    if q < 0:
        raise InputError("moment order must be non-negative")
    missing = float(np.max(np.abs(1.0 - series.total_probability)))
    tail = max(missing, series.tail_mass or 0.0)
    if tail > tail_tol:
        raise TailMassExceeded(tail, tail_tol)
    if line_convention and q % 2:
        return np.zeros(series.times.size)
    k = series.k_range.astype(float)
    out = series.probabilities @ (k**q)
    return 2 * out if line_convention and q else out


def sigma(m1, m2) -> np.ndarray:
    """Standard deviation ``sqrt(<k^2> - <k>^2)``, clipped at zero."""
    return np.sqrt(np.maximum(np.asarray(m2, dtype=float) - np.asarray(m1, dtype=float) ** 2, 0.0))


_u, _y, _g, _th, _z = sp.symbols("u y g theta z", positive=True)


@lru_cache(maxsize=None)
def _touchard(q: int):
    expr = sp.exp(_u)
    for _ in range(q):
        expr = _u * sp.diff(expr, _u)
    return sp.lambdify(_u, sp.expand(sp.simplify(expr * sp.exp(-_u))), "numpy")


@lru_cache(maxsize=None)
def _negbin(q: int):
    base = (1 - _y) ** (-(_g + 1))
    expr = base
    for _ in range(q):
        expr = _y * sp.diff(expr, _y)
    return sp.lambdify((_y, _g), sp.simplify(expr / base), "numpy")


@lru_cache(maxsize=None)
def _line_even(q: int):
    f = sp.diff(sp.exp(-sp.I * _z * sp.cos(_th)), _th, q // 2)
    integrand = sp.expand(sp.simplify(f * sp.conjugate(f)))
    poly = sp.integrate(integrand, (_th, 0, 2 * sp.pi)) / (2 * sp.pi)
    return sp.lambdify(_z, sp.expand(sp.simplify(poly)), "numpy")


def closed_moments(spec: FamilySpec, q: int, t) -> np.ndarray:
    """Symbolically derived ``<k^q>(t)`` for hermite, laguerre and line (``q <= 4``)."""
    if not 0 <= q <= MAX_CLOSED_ORDER:
        raise UnsupportedMomentOrder(f"closed moments are available for 0 <= q <= {MAX_CLOSED_ORDER}, got {q}")
    tau = spec.scale * np.asarray(t, dtype=float)
    kind = spec.kind
    if kind is FamilyKind.HermiteInfinite:
        out = _touchard(q)(tau**2)
    elif kind is FamilyKind.Laguerre:
        x = (spec["a"] * tau) ** 2
        out = _negbin(q)(x / (1 + x), float(spec["gamma"]))
    elif kind is FamilyKind.Line:
        out = 0.0 if q % 2 else (1.0 if q == 0 else 2 * _line_even(q)(2 * tau))
    else:
        raise NoClosedForm(f"no closed moments for {kind.value}")
    return np.broadcast_to(np.asarray(out, dtype=float), tau.shape).copy()


def fit_exponent(t, s, min_points: int = 20, min_decades: float = 1.0) -> tuple[float, float]:
    """Slope of ``log sigma`` against ``log t`` and its standard error.

    Needs ``min_points`` positive samples spanning ``min_decades`` in ``t``.
    """
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    keep = (t > 0) & (s > 0) & np.isfinite(s)
    if keep.sum() < min_points:
        raise InsufficientSpan(f"{int(keep.sum())} usable points, need {min_points}")
    tk, sk = t[keep], s[keep]
    if math.log10(tk.max() / tk.min()) < min_decades:
        raise InsufficientSpan(f"time span {tk.min():g}..{tk.max():g} under {min_decades:g} decade(s)")
    res = linregress(np.log(tk), np.log(sk))
    return float(res.slope), float(res.stderr)


@dataclass(frozen=True)
class MomentReport:
    """Moments per order (rows of ``values``), the spread and the fitted exponent."""

    times: np.ndarray
    orders: tuple
    values: np.ndarray
    sigma: np.ndarray
    nu: float | None = None
    nu_halfwidth: float | None = None

    def moment(self, q: int) -> np.ndarray:
        if q not in self.orders:
            raise InputError(f"order {q} not computed")
        return self.values[self.orders.index(q)]


def moment_report(series: AmplitudeSeries, orders=(1, 2), line_convention: bool = False,
                  fit: bool = True, tail_tol: float = 1e-8) -> MomentReport:
    """Moments of a series; ``sigma`` and ``nu`` use the first two orders."""
    orders = tuple(sorted(set(int(q) for q in orders) | {1, 2}))
    vals = np.array([moments_from_series(series, q, line_convention, tail_tol) for q in orders])
    sig = sigma(vals[orders.index(1)], vals[orders.index(2)])
    nu = hw = None
    if fit:
        try:
            nu, hw = fit_exponent(series.times, sig)
        except InsufficientSpan:
            pass
    return MomentReport(series.times, orders, vals, sig, nu, hw)
