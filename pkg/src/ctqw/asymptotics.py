"""Large-time behaviour of amplitude integrals.

An amplitude ``q(t) = int exp(-i x s t) g(x) dx`` over ``[-c, c]`` whose
density behaves like ``kappa (c -+ x)**beta`` at both edges has the
leading endpoint (stationary-phase) contribution::

    q(t) ~ 2 kappa Gamma(beta+1) (s t)**-(beta+1) cos(c s t - (beta+1) pi/2)

so ``p = beta + 1``: ``1/2`` for inverse square-root edges and ``3/2`` for
square-root edges.  Atoms of the measure add undamped oscillations
``sum_j w_j exp(-i x_j s t)`` on top of this.

The module also holds the finite/infinite comparison ``pi(n, t)`` between
``J_0(t)`` and its ``n``-point Chebyshev quadrature, and envelope / power-law
fitting used to validate the asymptotic forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln, j0
from scipy.stats import linregress

from .errors import InputError, ParameterOutOfDomain, UnsupportedEdgeBehavior, WindowTooShort
from .spectral import ContinuousMeasure

__all__ = [
    "AsymptoticForm",
    "PowerLawFit",
    "WKBReport",
    "stationary_phase_edge",
    "laguerre_asymptotic",
    "finite_infinite_diff",
    "pi_table",
    "envelope",
    "fit_power_law",
    "wkb_validate",
]


@dataclass(frozen=True)
class AsymptoticForm:
    """``q(t) ~ atoms(t) + C t^-p cos(W t - phi0)``, or ``|q(t)| ~ C t^-p`` when ``modulus_only``."""

    amplitude_coeff: float
    decay_exponent: float
    frequency: float
    phase_offset: float
    modulus_only: bool = False
    atoms: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        if not self.amplitude_coeff > 0:
            raise InputError("amplitude coefficient must be positive")
        if not self.decay_exponent > 0:
            raise InputError("decay exponent must be positive")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.frequency if self.frequency else math.inf

    def envelope(self, t):
        return self.amplitude_coeff * np.asarray(t, dtype=float) ** (-self.decay_exponent)

    def atom_part(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for x, w in self.atoms:
            out = out + w * np.exp(-1j * x * self.scale * t)
        return out

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        if self.modulus_only:
            return self.envelope(t)
        return self.atom_part(t) + self.envelope(t) * np.cos(self.frequency * t - self.phase_offset)


def stationary_phase_edge(measure: ContinuousMeasure, scale: float = 1.0) -> AsymptoticForm:
    """Leading endpoint asymptotics of ``q_0(t)`` for a symmetric measure on ``[-c, c]``."""
    if not isinstance(measure, ContinuousMeasure) or not measure.bounded:
        raise UnsupportedEdgeBehavior("need a continuous measure with bounded support")
    if not scale > 0:
        raise InputError("scale must be positive")
    lo, hi = measure.support
    if len(measure.edges) != 2 or not math.isclose(lo, -hi):
        raise UnsupportedEdgeBehavior("need analytically classified edges at -c and c")
    (x1, k1, b1), (x2, k2, b2) = sorted(measure.edges)
    if not (math.isclose(x1, lo) and math.isclose(x2, hi)):
        raise UnsupportedEdgeBehavior("edges must sit at the support endpoints")
    if not (math.isclose(k1, k2) and math.isclose(b1, b2)):
        raise UnsupportedEdgeBehavior("asymmetric edges do not give a single cosine")
    if not (b1 > -1 and k1 > 0):
        raise UnsupportedEdgeBehavior(f"edge exponent {b1} / coefficient {k1} not integrable")
    c, kappa, beta = hi, k1, b1
    p = beta + 1
    coeff = 2 * kappa * math.gamma(p) * scale ** (-p)
    return AsymptoticForm(coeff, p, c * scale, p * math.pi / 2, atoms=tuple(measure.atoms), scale=scale)


def laguerre_asymptotic(a: float, gamma: float, k: int = 0, scale: float = 1.0) -> AsymptoticForm:
    """``|q_k(t)| ~ sqrt((gamma+k)!/(k! gamma!)) (a s t)^-(gamma+1)``.

    The oscillation ``exp(-i b s t)`` with ``b = -a (1 + gamma)`` is kept in
    ``frequency`` for reference; the form itself is modulus-only.
    """
    if not a > 0 or not gamma > -1:
        raise ParameterOutOfDomain(f"laguerre needs a > 0 and gamma > -1 (a={a}, gamma={gamma})")
    if k < 0:
        raise InputError("k must be non-negative")
    p = gamma + 1
    logc = 0.5 * (gammaln(gamma + k + 1) - gammaln(k + 1) - gammaln(gamma + 1)) - p * math.log(a * scale)
    b = -a * (1 + gamma)
    return AsymptoticForm(math.exp(logc), p, b * scale, 0.0, modulus_only=True, scale=scale)


def finite_infinite_diff(n: int, t) -> np.ndarray | float:
    """``pi(n, t) = |J_0(t) - (1/n) sum_k exp(-i t cos((2k+1) pi / (2n)))|``."""
    if n < 1:
        raise InputError("n must be at least 1")
    t = np.asarray(t, dtype=float)
    c = np.cos((2 * np.arange(n) + 1) * np.pi / (2 * n))
    flat = t.reshape(-1)
    out = np.empty(flat.size)
    block = max(1, (1 << 22) // n)
    for i in range(0, flat.size, block):
        tt = flat[i : i + block]
        s = np.exp(-1j * np.multiply.outer(tt, c)).mean(axis=1)
        out[i : i + block] = np.abs(j0(tt) - s)
    out = out.reshape(t.shape)
    return out if out.ndim else float(out)


def pi_table(ns: Sequence[int], t_grid) -> np.ndarray:
    """``max_t pi(n, t)`` over ``t_grid`` for each ``n``."""
    t_grid = np.asarray(t_grid, dtype=float)
    return np.array([float(np.max(finite_infinite_diff(int(n), t_grid))) for n in ns])


def envelope(t, y, t1: float, t2: float, period: float, centers: int = 200):
    """Sliding maxima of ``|y|`` over one period around log-spaced centers.

    Returns ``(locations, maxima)`` where each location is the time at which
    the window maximum is attained, so a decaying envelope is not biased
    toward the window's leading edge.  Maxima that are not local maxima of
    the samples (window-edge values) are dropped.  ``period = 0`` samples ``|y|`` at the
    centers instead (monotone, modulus-only signals).
    """
    t = np.asarray(t, dtype=float)
    y = np.abs(np.asarray(y))
    if centers < 2:
        raise InputError("need at least two centers")
    c = np.geomspace(t1, t2, centers)
    if period <= 0:
        return c, np.interp(c, t, y)
    lo = np.searchsorted(t, c - period / 2, side="left")
    hi = np.searchsorted(t, c + period / 2, side="right")
    if np.any(hi - lo < 2):
        raise InputError("time grid too coarse to resolve one period")
    idx = np.array([a + int(np.argmax(y[a:b])) for a, b in zip(lo, hi)])
    # a decaying signal can peak at a window edge; keep genuine local maxima only
    inner = (idx > 0) & (idx < t.size - 1)
    idx = idx[inner]
    peak = (y[idx] >= y[idx - 1]) & (y[idx] >= y[idx + 1])
    idx = idx[peak]
    if idx.size < 2:
        raise InputError("fewer than two local maxima in the window")
    return t[idx], y[idx]


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit ``log y = intercept + slope log t``."""

    slope: float
    intercept: float
    stderr: float
    r2: float
    resid_rms: float

    @property
    def coeff(self) -> float:
        return math.exp(self.intercept)

    def is_power_law(self, tol: float = 0.05) -> bool:
        """A power law is accepted when log-space residuals stay below ``tol``."""
        return self.resid_rms < tol


def fit_power_law(t, y) -> PowerLawFit:
    t = np.asarray(t, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    keep = (t > 0) & (y > 0) & np.isfinite(y)
    if keep.sum() < 3:
        raise InputError("need at least three positive samples for a power-law fit")
    lt, ly = np.log(t[keep]), np.log(y[keep])
    res = linregress(lt, ly)
    resid = ly - (res.intercept + res.slope * lt)
    return PowerLawFit(float(res.slope), float(res.intercept), float(res.stderr),
                       float(res.rvalue**2), float(np.sqrt(np.mean(resid**2))))


@dataclass(frozen=True)
class WKBReport:
    max_err: float
    mean_err: float
    p_fitted: float
    p_stderr: float
    p_theory: float
    C_fitted: float
    C_theory: float
    envelope_rel_err: float
    window: tuple
    fit: PowerLawFit = field(repr=False)

    def to_dict(self, family: str = "") -> dict:
        return {
            "family": family,
            "p_fitted": self.p_fitted,
            "p_theory": self.p_theory,
            "C_fitted": self.C_fitted,
            "C_theory": self.C_theory,
            "envelope_rel_err": self.envelope_rel_err,
            "max_err": self.max_err,
            "mean_err": self.mean_err,
            "window": list(self.window),
        }


def wkb_validate(exact, approx, t_window, k: int = 0, centers: int = 200) -> WKBReport:
    """Compare an amplitude series against an asymptotic form on ``[t1, t2]``.

    ``max_err``/``mean_err`` are ``|exact - approx| t^p`` over the window (the
    error in units of the leading coefficient).  The decay exponent and
    coefficient are refitted from the envelope of ``exact`` minus the atom
    part of ``approx``; ``envelope_rel_err`` is the largest relative gap
    between that envelope and ``C t^-p``.

    ``approx`` may also be a plain callable ``t -> q(t)`` (a reference
    amplitude rather than a power law); errors are then unscaled, the
    theory fields are NaN and ``envelope_rel_err`` compares moduli sample
    by sample.
    """
    t1, t2 = map(float, t_window)
    if not 0 < t1 < t2:
        raise InputError("window must satisfy 0 < t1 < t2")
    t = exact.times
    q = exact.column(k)
    sel = (t >= t1) & (t <= t2)
    if sel.sum() < 3:
        raise InputError("no samples inside the window")
    ts, qs = t[sel], q[sel]
    if not isinstance(approx, AsymptoticForm):
        ref = np.asarray(approx(ts))
        diff = np.abs(qs - ref)
        c, env = envelope(ts, qs, t1, t2, 0.0, centers)
        fit = fit_power_law(c, env)
        nz = np.abs(ref) > 0
        rel = np.abs(np.abs(qs[nz]) / np.abs(ref[nz]) - 1)
        nan = float("nan")
        return WKBReport(float(diff.max()), float(diff.mean()), -fit.slope, fit.stderr, nan,
                         fit.coeff, nan, float(rel.max()), (t1, t2), fit)
    if not approx.modulus_only and (t2 - t1) < 3 * approx.period:
        raise WindowTooShort(f"window {t2 - t1:g} shorter than three periods ({3 * approx.period:g})")
    if approx.modulus_only:
        diff = np.abs(np.abs(qs) - approx.evaluate(ts))
        residual = np.abs(q)
        period = 0.0
    else:
        diff = np.abs(qs - approx.evaluate(ts))
        residual = q - approx.atom_part(t)
        period = approx.period
    scaled = diff * ts**approx.decay_exponent
    c, env = envelope(t, residual, t1 + period / 2, t2 - period / 2, period, centers)
    fit = fit_power_law(c, env)
    rel = np.abs(env / approx.envelope(c) - 1)
    return WKBReport(float(scaled.max()), float(scaled.mean()), -fit.slope, fit.stderr,
                     approx.decay_exponent, fit.coeff, approx.amplitude_coeff, float(rel.max()),
                     (t1, t2), fit)
