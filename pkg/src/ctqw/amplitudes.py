"""Stratum amplitudes ``q_k(t) = <phi_k| exp(-i s A t) |phi_0>``.

Three independent routes are provided:

* spectral quadrature, ``q_k(t) = sum_l A_l exp(-i x_l s t) p_k(x_l)`` with
  orthonormal polynomials ``p_k``;
* the truncated recurrence ODE
  ``i dq_k/dt = s (sqrt(w_{k+1}) q_{k+1} + a_{k+1} q_k + sqrt(w_k) q_{k-1})``
  integrated with classical fourth-order Runge-Kutta;
* closed forms for the named families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln, jv, roots_hermitenorm

from .errors import DegenerateNodes, InputError, NoClosedForm, QuadratureNotConverged, TailMassExceeded
from .families import FamilyKind, FamilySpec, family_jacobi
from .graph_core import Graph, JacobiSeq, Stratification, stratify
from .spectral import ContinuousMeasure, DiscreteMeasure, jacobi_to_quadrature

__all__ = [
    "Method",
    "AmplitudeSeries",
    "eval_poly",
    "orthonormal_values",
    "amplitude_quadrature",
    "quadrature_series",
    "amplitude_ode",
    "amplitude_closed_form",
    "closed_form_series",
    "site_amplitude",
    "avg_probability",
    "product_amplitude",
    "default_order",
]


class Method(str, Enum):
    Quadrature = "quadrature"
    ODE = "ode"
    ClosedForm = "closed"
    Product = "product"
    Oracle = "oracle"


@dataclass(frozen=True)
class AmplitudeSeries:
    """Amplitudes ``values[i, j] = q_{k_range[j]}(times[i])``."""

    times: np.ndarray
    k_range: np.ndarray
    values: np.ndarray
    method: Method
    tail_mass: float | None = None
    order: int | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        k = np.asarray(self.k_range, dtype=int).reshape(-1)
        v = np.asarray(self.values, dtype=complex).reshape(t.size, k.size)
        for arr in (t, k, v):
            arr.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "k_range", k)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "method", Method(self.method))

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    @property
    def total_probability(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    def column(self, k: int) -> np.ndarray:
        idx = np.flatnonzero(self.k_range == k)
        if idx.size == 0:
            raise InputError(f"stratum {k} not in series")
        return self.values[:, idx[0]]

    def rows(self):
        """Yield ``(t, k, q)`` in time-major order."""
        for i, t in enumerate(self.times):
            for j, k in enumerate(self.k_range):
                yield float(t), int(k), complex(self.values[i, j])


def _times(t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.ndim != 1 or np.any(~np.isfinite(t)):
        raise InputError("times must be a finite 1-D grid")
    return t


def eval_poly(j: JacobiSeq, k: int, x):
    """Monic ``Q_k(x)`` from ``Q_0 = 1``, ``Q_1 = x - a_1`` and the three-term recurrence."""
    if k < 0:
        raise InputError("k must be non-negative")
    x = np.asarray(x, dtype=float)
    a = j.alphas(max(k, 1))
    w = j.omegas(max(k - 1, 1))
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for n in range(k):
        nxt = (x - a[n]) * cur - (w[n - 1] * prev if n else 0.0)
        prev, cur = cur, nxt
    return cur if cur.ndim else float(cur)


def orthonormal_values(j: JacobiSeq, kmax: int, x) -> np.ndarray:
    """Rows ``p_0(x) .. p_kmax(x)`` of the orthonormal polynomials ``Q_k/sqrt(w_1...w_k)``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if j.is_finite and kmax > j.length - 1:
        raise InputError(f"stratum {kmax} beyond the {j.length} strata")
    a = j.alphas(kmax + 1)
    sw = np.sqrt(j.omegas(kmax))
    out = np.empty((kmax + 1, x.size))
    out[0] = 1.0
    if kmax >= 1:
        out[1] = (x - a[0]) / sw[0]
    for n in range(1, kmax):
        out[n + 1] = ((x - a[n]) * out[n] - sw[n - 1] * out[n - 1]) / sw[n]
    return out


def amplitude_quadrature(measure, j: JacobiSeq, k: int, t):
    """``q_k(t)`` by integrating ``exp(-i x s t) p_k(x)`` against ``measure``."""
    tau = j.scale * np.asarray(t, dtype=float)
    if isinstance(measure, DiscreteMeasure):
        p = orthonormal_values(j, k, measure.nodes)[k]
        out = np.exp(-1j * np.multiply.outer(tau, measure.nodes)) @ (measure.weights * p)
        return out if np.ndim(out) else complex(out)
    if isinstance(measure, ContinuousMeasure):
        def g(x, k=k):
            return orthonormal_values(j, k, np.atleast_1d(x))[k][0]

        return measure.fourier(tau, g)
    raise InputError(f"unsupported measure type {type(measure).__name__}")


def default_order(j: JacobiSeq, t_max: float, kmax: int = 0) -> int:
    """Starting quadrature order for an infinite sequence: ``max(64, ceil(4 t), 2 (kmax+1))``."""
    return int(max(64, math.ceil(4 * t_max), 2 * (kmax + 1)))


def _series_at_order(j: JacobiSeq, kmax: int, times: np.ndarray, n: int) -> np.ndarray:
    m = jacobi_to_quadrature(j, n)
    p = orthonormal_values(j, kmax, m.nodes)
    weighted = (m.weights * p).T  # (n, kmax+1)
    out = np.empty((times.size, kmax + 1), dtype=complex)
    block = max(1, (1 << 22) // max(n, 1))
    for i in range(0, times.size, block):
        phase = np.exp(-1j * j.scale * np.multiply.outer(times[i : i + block], m.nodes))
        out[i : i + block] = phase @ weighted
    return out


def quadrature_series(j: JacobiSeq, kmax: int, times, order: int | None = None,
                      tol: float = 1e-10, max_order: int = 16384) -> AmplitudeSeries:
    """Amplitudes ``q_0..q_kmax`` on a time grid by Gauss quadrature.

    Finite sequences use all strata (exact).  For infinite ones a given
    ``order`` is used as is; otherwise the order starts at
    :func:`default_order` and doubles until two successive orders agree
    within ``tol``.
    """
    times = _times(times)
    if kmax < 0:
        raise InputError("kmax must be non-negative")
    if j.is_finite:
        if kmax > j.length - 1:
            raise InputError(f"kmax {kmax} beyond the {j.length} strata")
        vals = _series_at_order(j, kmax, times, j.length)
        return AmplitudeSeries(times, np.arange(kmax + 1), vals, Method.Quadrature, order=j.length)
    if order is not None:
        if order <= kmax:
            raise InputError("quadrature order must exceed kmax")
        vals = _series_at_order(j, kmax, times, order)
        return AmplitudeSeries(times, np.arange(kmax + 1), vals, Method.Quadrature, order=order)
    n = default_order(j, j.scale * float(np.max(np.abs(times))) * _radius_hint(j), kmax)
    prev = _series_at_order(j, kmax, times, n)
    while True:
        if 2 * n > max_order:
            raise QuadratureNotConverged(f"no agreement to {tol:g} below order {max_order}")
        cur = _series_at_order(j, kmax, times, 2 * n)
        n *= 2
        if np.max(np.abs(cur - prev)) < tol:
            return AmplitudeSeries(times, np.arange(kmax + 1), cur, Method.Quadrature, order=n)
        prev = cur


def _radius_hint(j: JacobiSeq) -> float:
    """Rough half-width of the spectrum near the origin stratum, for order heuristics."""
    w = j.omegas(8)
    return max(1.0, float(np.sqrt(np.max(w))) / 2)


_DENSE_LIMIT = 256


def amplitude_ode(j: JacobiSeq, K: int, times, step: float | None = None,
                  tail_tol: float = 1e-8, check_tail: bool = True) -> AmplitudeSeries:
    """Integrate the truncated recurrence for strata ``0..K`` with RK4.

    Each RK4 step of this linear system is the degree-4 Taylor polynomial of
    ``-i s h J`` applied to the state; the step matrix is formed once (and
    raised to the sub-step count for small systems).  Each output interval
    is split into equal sub-steps no longer than
    ``step``; by default ``step = min(0.002, 0.25 / rho)`` with ``rho`` a
    Gershgorin bound on the spectral radius of ``s J``.  The largest
    ``|q_K(t)|^2`` over the grid is reported as ``tail_mass``; if it
    exceeds ``tail_tol`` (and the truncation is not the whole finite
    sequence) :class:`TailMassExceeded` is raised when ``check_tail``.
    """
    times = _times(times)
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise InputError("ODE times must be non-negative and non-decreasing")
    if K < 0:
        raise InputError("K must be non-negative")
    size = K + 1
    whole = False
    if j.is_finite and size >= j.length:
        size, whole = j.length, True
    d, e = j.tridiagonal(size)
    s = j.scale
    rho = s * float(np.max(np.abs(d)) + 2 * (np.max(e) if e.size else 0.0))
    h_max = step if step is not None else min(0.002, 0.25 / max(rho, 1e-12))
    # For a linear system one RK4 step is q <- P(hM) q with
    # P(z) = 1 + z + z^2/2 + z^3/6 + z^4/24 and M = -i s J, a banded matrix.
    jac = sp.diags([e, d, e], [-1, 0, 1], shape=(size, size), format="csr") if size > 1 else sp.csr_matrix(d.reshape(1, 1))
    m_op = (-1j * s) * jac
    cache: dict = {}

    def propagator(h: float, nsub: int):
        key = (h, nsub)
        if key not in cache:
            a = h * m_op
            a2 = a @ a
            p_step = sp.identity(size, dtype=complex, format="csr") + a + a2 / 2 + (a2 @ a) / 6 + (a2 @ a2) / 24
            if size <= _DENSE_LIMIT:
                cache[key] = np.linalg.matrix_power(p_step.toarray(), nsub)
            else:
                cache[key] = p_step
        return cache[key]

    q = np.zeros(size, dtype=complex)
    q[0] = 1.0
    out = np.empty((times.size, size), dtype=complex)
    now = 0.0
    for i, target in enumerate(times):
        span = target - now
        if span > 0:
            nsub = max(1, math.ceil(span / h_max - 1e-9))
            prop = propagator(span / nsub, nsub)
            if isinstance(prop, np.ndarray):
                q = prop @ q
            else:
                for _ in range(nsub):
                    q = prop @ q
            now = target
        out[i] = q
    tail = float(np.max(np.abs(out[:, -1]) ** 2)) if not whole else 0.0
    if check_tail and tail > tail_tol:
        raise TailMassExceeded(tail, tail_tol)
    return AmplitudeSeries(times, np.arange(size), out, Method.ODE, tail_mass=tail, order=size)


# ---------------------------------------------------------------- closed forms

K_ = FamilyKind


def _sine_sum(c: float, strata: int, k: int, tau):
    th = np.arange(1, strata + 1) * np.pi / (strata + 1)
    coef = 2.0 / (strata + 1) * np.sin(th) * np.sin((k + 1) * th)
    return np.exp(-1j * 2 * c * np.multiply.outer(tau, np.cos(th))) @ coef


def _bessel_line(radius: float, k: int, tau):
    z = radius * tau
    if k == 0:
        return jv(0, z) + 0j
    return math.sqrt(2.0) * (-1j) ** k * jv(k, z)


def _vector_q0(tau):
    r5 = math.sqrt(5.0)
    return 0.2 * np.exp(-1j * tau) * (2 + 3 * np.cos(r5 * tau) + 1j * r5 * np.sin(r5 * tau))


def _hermite3(k: int, tau):
    r6 = math.sqrt(6.0)
    a, b = math.sqrt(3 + r6), math.sqrt(3 - r6)
    if k == 0:
        return 0.5 * (np.cos(a * tau) + np.cos(b * tau)) + 0j
    if k == 1:
        return -1j / (2 * math.sqrt(3.0)) * (a * np.sin(a * tau) + b * np.sin(b * tau))
    if k == 2:
        return 0.5 * (np.cos(a * tau) - np.cos(b * tau)) + 0j
    return -1j / (2 * r6) * (a * (r6 - 2) * np.sin(a * tau) - b * (r6 + 2) * np.sin(b * tau))


def _laguerre(a: float, g: float, k: int, tau):
    tau = np.asarray(tau, dtype=float)
    b = -a * (1 + g)
    at = a * tau
    with np.errstate(divide="ignore"):
        logmod = (0.5 * (gammaln(g + k + 1) - gammaln(k + 1) - gammaln(g + 1))
                  + (k * np.log(np.abs(at)) if k else 0.0)
                  - 0.5 * (k + g + 1) * np.log1p(at * at))
    phase = -b * tau - k * math.pi / 2 - (k + g + 1) * np.arctan(at)
    return np.exp(logmod + 1j * phase)


def _hermite_inf(k: int, tau):
    tau = np.asarray(tau, dtype=float)
    with np.errstate(divide="ignore"):
        logmod = (k * np.log(np.abs(tau)) if k else 0.0) - 0.5 * gammaln(k + 1) - 0.5 * tau * tau
    sign = np.sign(tau) ** k if k else 1.0
    return sign * (-1j) ** k * np.exp(logmod)


def amplitude_closed_form(spec: FamilySpec, k: int, t):
    """Closed-form ``q_k(t)`` for families with a known formula.

    The Hamiltonian prefactor is ``spec.scale``; with the default scales
    these reduce to the familiar forms, e.g. ``J_0(t)`` for the line and
    ``cos(t/n)**n`` for the n-cube.
    """
    if k < 0:
        raise InputError("k must be non-negative")
    kind, p = spec.kind, spec.params
    tau = spec.scale * np.asarray(t, dtype=float)
    out = _closed(kind, p, k, tau)
    if out is None:
        raise NoClosedForm(f"no closed form for {kind.value} at stratum {k}")
    out = np.asarray(out, dtype=complex)
    return out if out.ndim else complex(out)


def _closed(kind, p, k, tau):
    if kind is K_.CompleteK:
        n = p["n"]
        e1, e2 = np.exp(-1j * (n - 1) * tau), np.exp(1j * tau)
        if k == 0:
            return (e1 + (n - 1) * e2) / n
        if k == 1:
            return math.sqrt(n - 1) / n * (e1 - e2)
        return None
    if kind is K_.CycleC:
        n = p["n"]
        if k > n // 2:
            return None
        size = 1 if k == 0 or 2 * k == n else 2
        l = np.arange(n)
        th = 2 * np.pi * l / n
        coef = np.cos(th * k) / n
        return math.sqrt(size) * (np.exp(-1j * 2 * np.multiply.outer(tau, np.cos(th))) @ coef)
    if kind is K_.PathP:
        return _sine_sum(1.0, p["n"], k, tau) if k < p["n"] else None
    if kind is K_.GluedTreesG:
        strata = 2 * p["n"] + 1
        return _sine_sum(math.sqrt(2.0), strata, k, tau) if k < strata else None
    if kind is K_.Hypercube:
        n = p["n"]
        if k > n:
            return None
        return math.sqrt(math.comb(n, k)) * np.cos(tau) ** (n - k) * (-1j * np.sin(tau)) ** k
    if kind is K_.Line:
        return _bessel_line(2.0, k, tau)
    if kind is K_.Comb2D:
        return _bessel_line(2 * math.sqrt(2.0), k, tau)
    if kind is K_.Tchebichef1:
        r, n = 2.0 ** p["m"], p.get("n")
        if n is None:
            return _bessel_line(r, k, tau)
        if k >= n:
            return None
        phi = (2 * np.arange(n) + 1) * np.pi / (2 * n)
        coef = np.full(n, 1.0 / n) if k == 0 else math.sqrt(2.0) / n * np.cos(k * phi)
        return np.exp(-1j * r * np.multiply.outer(tau, np.cos(phi))) @ coef
    if kind is K_.Tchebichef2:
        r, n = 2.0 ** p["m"], p.get("n")
        if n is None:
            return (-1j) ** k * (jv(k, r * tau) + jv(k + 2, r * tau))
        return _sine_sum(r / 2, n, k, tau) if k < n else None
    if kind is K_.HermiteFinite:
        n = p["n"]
        if n == 3 and k <= 3:
            return _hermite3(k, tau)
        if k == 0:
            x = roots_hermitenorm(n + 1)[0]
            return np.exp(-1j * np.multiply.outer(tau, x)).mean(axis=-1)
        return None
    if kind is K_.HermiteInfinite:
        return _hermite_inf(k, tau)
    if kind is K_.Laguerre:
        return _laguerre(float(p["a"]), float(p["gamma"]), k, tau)
    if kind is K_.VectorGraph:
        return _vector_q0(tau) if k == 0 else None
    if kind is K_.AngularMomentum:
        return _vector_q0(tau) ** p["n"] if k == 0 else None
    return None


def closed_form_series(spec: FamilySpec, kmax: int, times) -> AmplitudeSeries:
    times = _times(times)
    vals = np.column_stack([np.atleast_1d(amplitude_closed_form(spec, k, times)) for k in range(kmax + 1)])
    return AmplitudeSeries(times, np.arange(kmax + 1), vals, Method.ClosedForm)


# ---------------------------------------------------------------- graph-level helpers


def site_amplitude(g: Graph, s: Stratification | None, j: JacobiSeq, vertex: int, t):
    """Amplitude on a single vertex: ``q_k(t) / sqrt(|V_k|)`` for its stratum ``k``."""
    if s is None:
        s = stratify(g)
    k = s.stratum_of(vertex)
    q = amplitude_quadrature(jacobi_to_quadrature(j), j, k, t)
    return q / math.sqrt(len(s.strata[k]))


def avg_probability(measure: DiscreteMeasure, j: JacobiSeq, k: int) -> float:
    """Long-time average of ``|q_k(t)|^2``: ``sum_l A_l^2 p_k(x_l)^2``."""
    if not isinstance(measure, DiscreteMeasure):
        raise InputError("time averages need a discrete measure")
    x = measure.nodes
    if x.size > 1 and np.min(np.diff(x)) < 1e-9:
        raise DegenerateNodes("nodes closer than 1e-9; the average needs a simple spectrum")
    p = orthonormal_values(j, k, x)[k]
    return float(np.sum(measure.weights**2 * p**2))


def product_amplitude(factors: Sequence[Callable], t):
    """Ground amplitude of a Cartesian product: the product of the factors' ``q_0(t)``."""
    out = np.ones(np.shape(t), dtype=complex)
    for f in factors:
        out = out * np.asarray(f(t), dtype=complex)
    return out if out.ndim else complex(out)
