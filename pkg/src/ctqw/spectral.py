"""Spectral measures of Jacobi sequences.

Gauss quadrature nodes are the eigenvalues of the truncated Jacobi matrix.
The weights are squared first components of the normalized eigenvectors;
they are computed with a twisted factorization of ``J - x I`` at each node
rather than from a dense eigenvector matrix, which keeps tiny weights
accurate to working precision (important for graded families such as the
elliptic and Carlitz sequences, where weights span hundreds of decades).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.integrate as si
import scipy.linalg as sl
from scipy.special import logsumexp

from .errors import (
    DivergentFraction,
    EigenSolverFailure,
    InputError,
    QuadratureNotConverged,
)
from .graph_core import JacobiSeq

__all__ = [
    "DiscreteMeasure",
    "ContinuousMeasure",
    "jacobi_to_quadrature",
    "gauss_weights",
    "stieltjes_cf",
    "stieltjes_inversion",
    "jacobi_moments",
]


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms ``x_l`` (ascending) with positive weights ``A_l`` summing to 1."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float).reshape(-1)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if x.shape != w.shape or x.size == 0:
            raise InputError("nodes and weights must be non-empty and of equal length")
        if np.any(w < 0):
            raise InputError("weights must be non-negative")
        order = np.argsort(x, kind="stable")
        x, w = x[order], w[order]
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.nodes.size

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]):
        return np.sum(self.weights * f(self.nodes))

    def moment(self, m: int) -> float:
        return float(np.sum(self.weights * self.nodes**m))

    def stieltjes(self, z):
        z = np.asarray(z, dtype=complex)
        return np.sum(self.weights / (z[..., None] - self.nodes), axis=-1)

    def fourier(self, tau, g: Callable[[np.ndarray], np.ndarray] | None = None):
        """``sum_l A_l g(x_l) exp(-i x_l tau)`` for scalar or array ``tau``."""
        tau = np.asarray(tau, dtype=float)
        gx = self.weights if g is None else self.weights * g(self.nodes)
        return np.exp(-1j * np.multiply.outer(tau, self.nodes)) @ gx


@dataclass(frozen=True)
class ContinuousMeasure:
    """Absolutely continuous density on ``support``, optionally plus atoms.

    ``edges`` lists analytically known endpoint behaviour as
    ``(position, kappa, beta)`` meaning ``density ~ kappa * |x - position|**beta``.
    """

    density: Callable[[np.ndarray], np.ndarray]
    support: tuple
    singular_endpoints: bool = False
    edges: tuple = ()
    atoms: tuple = ()
    name: str = ""

    def __post_init__(self):
        lo, hi = self.support
        if not lo < hi:
            raise InputError(f"empty support {self.support}")

    @property
    def atom_mass(self) -> float:
        return float(sum(w for _, w in self.atoms))

    @property
    def bounded(self) -> bool:
        lo, hi = self.support
        return bool(np.isfinite(lo) and np.isfinite(hi))

    def _quad(self, fn, a, b, limit=2000, **kw):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", si.IntegrationWarning)
            val, err = si.quad(fn, a, b, limit=limit, epsabs=1e-13, epsrel=1e-12, **kw)
        flagged = [w for w in caught if issubclass(w.category, si.IntegrationWarning)]
        # a flagged result is kept only when its own error estimate is tiny
        # (typically roundoff on an integral that cancels to zero)
        if not np.isfinite(val) or err > 1e-9 or (flagged and err > 1e-11):
            reason = str(flagged[0].message).splitlines()[0] if flagged else "tolerance not met"
            raise QuadratureNotConverged(f"{reason} (estimated error {err:.2e})")
        return val

    def _real_integral(self, h: Callable[[float], float], limit: int = 2000) -> float:
        """``int h(x) rho(x) dx`` over the support, atoms excluded.

        Bounded supports use ``x = mid + half*cos(theta)``, which removes
        inverse square-root endpoint singularities.
        """
        lo, hi = self.support
        if self.bounded:
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)

            def sub(th):
                x = mid + half * math.cos(th)
                return h(x) * float(self.density(x)) * half * math.sin(th)

            return self._quad(sub, 0.0, math.pi, limit=limit)
        return self._quad(lambda x: h(x) * float(self.density(x)), lo, hi, limit=limit)

    def _half_line(self, fn: Callable[[float], float], omega: float) -> complex:
        """``int_0^inf fn(y) exp(-i omega y) dy`` with Fourier-weighted quadrature."""
        c = self._quad(fn, 0.0, np.inf, weight="cos", wvar=abs(omega))
        s = self._quad(fn, 0.0, np.inf, weight="sin", wvar=abs(omega))
        return complex(c, -math.copysign(s, omega))

    def integrate(self, f: Callable) -> complex:
        """``int f dmu`` including atoms; ``f`` may be complex valued."""
        re = self._real_integral(lambda x: float(np.real(f(x))))
        im = self._real_integral(lambda x: float(np.imag(f(x))))
        out = complex(re, im)
        for x, w in self.atoms:
            out += w * complex(f(np.float64(x)))
        return out if out.imag != 0 else out.real

    def total_mass(self) -> float:
        return float(np.real(self.integrate(lambda x: 1.0)))

    def moment(self, m: int) -> float:
        return float(np.real(self.integrate(lambda x: x**m)))

    def fourier(self, tau, g: Callable | None = None):
        """``int g(x) exp(-i x tau) dmu(x)`` for scalar or array ``tau``."""
        g = (lambda x: 1.0) if g is None else g
        taus = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.array([self._fourier_one(float(tv), g) for tv in taus.flat], dtype=complex)
        return out.reshape(np.shape(tau)) if np.ndim(tau) else complex(out[0])

    def _fourier_one(self, tau: float, g: Callable) -> complex:
        lo, hi = self.support
        atoms = sum(w * complex(g(np.float64(x))) * np.exp(-1j * x * tau) for x, w in self.atoms)
        if self.bounded or tau == 0.0:
            width = hi - lo if self.bounded else 1.0
            limit = max(2000, int(50 * abs(tau) * width))
            re = self._real_integral(lambda x: math.cos(x * tau) * float(g(x)), limit)
            im = self._real_integral(lambda x: -math.sin(x * tau) * float(g(x)), limit)
            return complex(re, im) + atoms
        rho = self.density
        if np.isfinite(lo):
            body = np.exp(-1j * lo * tau) * self._half_line(lambda y: float(g(lo + y)) * float(rho(lo + y)), tau)
        else:
            body = self._half_line(lambda y: float(g(y)) * float(rho(y)), tau)
            body += self._half_line(lambda y: float(g(-y)) * float(rho(-y)), -tau)
        return body + atoms


def _gauss_weights_numpy(diag: np.ndarray, off: np.ndarray, nodes: np.ndarray, chunk_bytes: int = 256 << 20) -> np.ndarray:
    """Squared first eigenvector components of a Jacobi matrix at its eigenvalues.

    For each node ``x`` the eigenvector of ``J - x I`` is rebuilt from the
    forward and backward pivots of its LDL^T / UDU^T factorizations, twisted
    at the index where the combined pivot is smallest.  Products of pivot
    ratios are accumulated in log space so weights far below the underflow
    threshold of a plain eigenvector stay meaningful.
    """
    d = np.asarray(diag, dtype=float)
    e = np.asarray(off, dtype=float)
    x = np.asarray(nodes, dtype=float)
    n = d.size
    if n == 1:
        return np.ones_like(x)
    out = np.empty(x.size)
    step = max(1, int(chunk_bytes // (16 * n)))
    # Replacement for an exactly vanishing pivot (x is then an eigenvalue of a
    # leading block); scaled so e^2/tiny stays finite.
    tiny = np.finfo(float).eps ** 2 * max(1.0, float(np.max(np.abs(d)) + np.max(e)))
    loge = np.log(e)
    e2 = e * e
    for c0 in range(0, x.size, step):
        xs = x[c0 : c0 + step]
        m = xs.size
        dp = np.empty((n, m))
        dm = np.empty((n, m))
        v = d[0] - xs
        dp[0] = np.where(v == 0.0, tiny, v)
        for k in range(1, n):
            v = (d[k] - xs) - e2[k - 1] / dp[k - 1]
            v[v == 0.0] = tiny
            dp[k] = v
        v = d[n - 1] - xs
        dm[n - 1] = np.where(v == 0.0, tiny, v)
        best = np.abs(dp[n - 1])  # twisted pivot at k = n-1 is dp itself
        r = np.full(m, n - 1)
        for k in range(n - 2, -1, -1):
            v = (d[k] - xs) - e2[k] / dm[k + 1]
            v[v == 0.0] = tiny
            dm[k] = v
            with np.errstate(over="ignore", invalid="ignore"):
                g = np.abs(dp[k] + v - (d[k] - xs))
            better = g <= best  # ties favour the smaller index
            best = np.where(better, g, best)
            r = np.where(better, k, r)
        # log|u_k| with u_r = 1: left of r, sum_{j=k}^{r-1} (log e_j - log|dp_j|);
        # right of r, sum_{j=r+1}^{k} (log e_{j-1} - log|dm_j|).
        np.log(np.abs(dp), out=dp)
        np.log(np.abs(dm), out=dm)
        dp[:-1] = loge[:, None] - dp[:-1]
        dm[1:] = loge[:, None] - dm[1:]
        dp[-1] = 0.0
        dm[0] = 0.0
        np.cumsum(dp, axis=0, out=dp)  # dp[k] = S_{k+1}
        np.cumsum(dm, axis=0, out=dm)  # dm[k] = T_k
        cols = np.arange(m)
        s_r = np.where(r > 0, dp[r - 1, cols], 0.0)  # S_r
        t_r = dm[r, cols]
        k = np.arange(n)[:, None]
        s_prev = np.vstack([np.zeros((1, m)), dp[:-1]])  # S_k
        logu = np.where(k < r, s_r - s_prev, np.where(k > r, dm - t_r, 0.0))
        del s_prev
        out[c0 : c0 + m] = np.exp(2.0 * logu[0] - logsumexp(2.0 * logu, axis=0))
    return out


_BLOCK = 8


def _twisted_kernel(d, e, x, tiny):  # pragma: no cover - compiled
    # Nodes are processed in blocks so the serial pivot recurrences of
    # independent nodes interleave (the loop is latency bound otherwise).
    n = d.shape[0]
    m = x.shape[0]
    out = np.empty(m)
    dp = np.empty((n, _BLOCK))
    dm = np.empty((n, _BLOCK))
    e2 = e * e
    for b0 in range(0, m, _BLOCK):
        nb = min(_BLOCK, m - b0)
        for b in range(nb):
            v = d[0] - x[b0 + b]
            dp[0, b] = tiny if v == 0.0 else v
            v = d[n - 1] - x[b0 + b]
            dm[n - 1, b] = tiny if v == 0.0 else v
        for k in range(1, n):
            for b in range(nb):
                v = d[k] - x[b0 + b] - e2[k - 1] / dp[k - 1, b]
                dp[k, b] = tiny if v == 0.0 else v
        for k in range(n - 2, -1, -1):
            for b in range(nb):
                v = d[k] - x[b0 + b] - e2[k] / dm[k + 1, b]
                dm[k, b] = tiny if v == 0.0 else v
        for b in range(nb):
            xl = x[b0 + b]
            r = n - 1
            best = abs(dp[n - 1, b])
            for k in range(n - 2, -1, -1):
                g = abs(dp[k, b] + dm[k, b] - (d[k] - xl))
                if g <= best:
                    best = g
                    r = k
            # u_r = 1 sits at (or next to) the largest eigenvector entry, so
            # the sum of squares is at least 1 and entries below 1e-100 do
            # not affect it.  Only u_0 needs its full exponent: rescale the
            # running product and count the factors of 1e-200 taken out.
            acc = 1.0
            u = 1.0
            shifts = 0
            for k in range(r - 1, -1, -1):
                u = u * e[k] / abs(dp[k, b])
                if u < 1e-200:
                    u *= 1e200
                    shifts += 1
                if shifts == 0:
                    acc += u * u
            u0 = u
            u = 1.0
            for k in range(r + 1, n):
                u = u * e[k - 1] / abs(dm[k, b])
                if u < 1e-100:
                    break
                acc += u * u
            if shifts == 0:
                out[b0 + b] = u0 * u0 / acc
            else:
                out[b0 + b] = math.exp(2.0 * (math.log(u0) - shifts * 200.0 * math.log(10.0))) / acc
    return out


try:
    import numba

    _twisted_compiled = numba.njit(cache=True, nogil=True)(_twisted_kernel)
except ImportError:  # pragma: no cover - optional accelerator
    _twisted_compiled = None


def gauss_weights(diag: np.ndarray, off: np.ndarray, nodes: np.ndarray, accelerate: bool = True) -> np.ndarray:
    """Squared first eigenvector components of a Jacobi matrix at its eigenvalues.

    For each node ``x`` the eigenvector of ``J - x I`` is rebuilt from the
    forward and backward pivots of its LDL^T / UDU^T factorizations, twisted
    at the index where the combined pivot is smallest.  Products of pivot
    ratios are accumulated in log space so weights far below the underflow
    threshold of a plain eigenvector stay meaningful.  A compiled kernel is
    used when numba is importable; the numpy path gives the same numbers.
    """
    d = np.ascontiguousarray(diag, dtype=float)
    e = np.ascontiguousarray(off, dtype=float)
    x = np.ascontiguousarray(nodes, dtype=float)
    if d.size == 1:
        return np.ones_like(x)
    if accelerate and _twisted_compiled is not None and d.size > 32:
        tiny = np.finfo(float).eps ** 2 * max(1.0, float(np.max(np.abs(d)) + np.max(e)))
        return _twisted_compiled(d, e, x, tiny)
    return _gauss_weights_numpy(d, e, x)


def jacobi_to_quadrature(j: JacobiSeq, n: int | None = None) -> DiscreteMeasure:
    """Gauss quadrature of order ``n`` (default: all strata of a finite sequence)."""
    d, e = j.tridiagonal(n)
    if d.size == 1:
        return DiscreteMeasure(d.copy(), np.ones(1))
    try:
        nodes = sl.eigh_tridiagonal(d, e, eigvals_only=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverFailure(str(exc)) from exc
    nodes = np.sort(nodes)
    w = gauss_weights(d, e, nodes)
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise EigenSolverFailure("non-finite quadrature weights")
    return DiscreteMeasure(nodes, w / w.sum())


def _const_tail(z, a, w):
    """Solution ``g`` of ``g = 1/(z - a - w g)`` decaying like ``1/z``."""
    disc = np.sqrt((z - a) ** 2 - 4 * w + 0j)
    r1 = (z - a + disc) / (2 * w)
    r2 = (z - a - disc) / (2 * w)
    return np.where(np.abs(r1) <= np.abs(r2), r1, r2)


def stieltjes_cf(j: JacobiSeq, z, depth: int | None = None, terminator: str | None = "auto"):
    """Continued fraction ``1/(z - a_1 - w_1/(z - a_2 - w_2/...))`` evaluated bottom-up.

    Finite sequences stop at their length.  For infinite ones the tail below
    ``depth`` is replaced by the fixed point of a constant-coefficient fraction
    built from ``a_{depth+1}, w_{depth}`` when ``terminator="auto"`` (a
    square-root terminator), or dropped when ``terminator=None``.
    """
    z = np.asarray(z, dtype=complex)
    if depth is None:
        depth = j.length if j.is_finite else 400
    depth = int(depth)
    if depth < 1:
        raise InputError("depth must be at least 1")
    if j.is_finite:
        depth = min(depth, j.length)
    a = j.alphas(depth + 1)
    w = j.omegas(depth)
    if j.is_finite and depth == j.length or terminator is None:
        tail = np.zeros_like(z)
    else:
        tail = w[-1] * _const_tail(z, a[-1], w[-1])
    # An exact intermediate zero is a removable pole of the tail.  Complex
    # division by zero yields NaN, so nudge such pivots to a tiny value;
    # the next level then sees w/f ~ inf and the pole drops out.
    tiny = 1e-300
    f = z - a[depth - 1] - tail
    for k in range(depth - 2, -1, -1):
        f = np.where(f == 0, tiny, f)
        f = z - a[k] - w[k] / f
    if np.any(~np.isfinite(f)):
        raise DivergentFraction("continued fraction overflowed")
    if np.any(f == 0):
        raise DivergentFraction("z is a pole of the transform")
    out = 1.0 / f
    return out if out.ndim else complex(out)


def stieltjes_inversion(j: JacobiSeq, grid, eps: float = 1e-6, depth: int | None = None, terminator: str | None = "auto") -> np.ndarray:
    """Density estimate ``-Im G(u + i eps) / pi`` on ``grid``."""
    if not eps > 0:
        raise InputError("eps must be positive")
    u = np.asarray(grid, dtype=float)
    return -np.imag(stieltjes_cf(j, u + 1j * eps, depth, terminator)) / np.pi


def jacobi_moments(j: JacobiSeq, m_max: int) -> np.ndarray:
    """``<phi_0|J^m|phi_0>`` for ``m = 0..m_max`` by repeated tridiagonal products.

    Uses ``<e_0, J^m e_0> = <J^r e_0, J^(m-r) e_0>`` with ``r = m // 2``; the
    vector ``J^r e_0`` is supported on the first ``r + 1`` strata, so a
    truncation of size ``m_max // 2 + 2`` is exact.
    """
    size = m_max // 2 + 2
    if j.is_finite:
        size = min(size, j.length)
    d, e = j.tridiagonal(size)
    powers = [np.zeros(size)]
    powers[0][0] = 1.0
    for _ in range(m_max - m_max // 2):
        v = powers[-1]
        nxt = d * v
        nxt[:-1] += e * v[1:]
        nxt[1:] += e * v[:-1]
        powers.append(nxt)
    out = np.empty(m_max + 1)
    for m in range(m_max + 1):
        r = m // 2
        out[m] = float(np.dot(powers[r], powers[m - r]))
    return out
