"""Named graph families and their Jacobi sequences.

Each family is addressed by a :class:`FamilySpec` (kind plus named
parameters).  Finite families with an explicit vertex structure can be
built as :class:`~ctqw.graph_core.Graph`; every family has a Jacobi
sequence, and the families with a known spectral measure expose it
through :func:`closed_form_measure`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy.special import comb

from .errors import InputError, NoClosedFormMeasure, ParameterOutOfDomain, UnsupportedFamily
from .graph_core import Graph, JacobiSeq, build_graph
from .spectral import ContinuousMeasure, DiscreteMeasure, jacobi_to_quadrature

__all__ = [
    "FamilyKind",
    "FamilySpec",
    "parse_family",
    "family_graph",
    "family_jacobi",
    "product_jacobi_classA",
    "product_jacobi_classB",
    "closed_form_measure",
    "FAMILY_INFO",
]


class FamilyKind(str, Enum):
    CompleteK = "complete"
    CycleC = "cycle"
    PathP = "path"
    GluedTreesG = "glued-trees"
    Hypercube = "hypercube"
    Line = "line"
    Tchebichef1 = "tchebichef1"
    Tchebichef2 = "tchebichef2"
    HermiteFinite = "hermite-finite"
    HermiteInfinite = "hermite"
    Laguerre = "laguerre"
    StarLattice = "star"
    Comb2D = "comb"
    VectorGraph = "vector"
    AngularMomentum = "angular-momentum"
    Charlier = "charlier"
    Meixner2 = "meixner2"
    EllipticA = "elliptic-a"
    EllipticB = "elliptic-b"
    EllipticC = "elliptic-c"
    EllipticD = "elliptic-d"
    CarlitzF = "carlitz-f"
    CarlitzG = "carlitz-g"
    CarlitzGstar = "carlitz-gstar"
    ProductClassA = "class-a"
    ProductClassB = "class-b"


K = FamilyKind

# kind -> (required params, defaults, one-line description)
FAMILY_INFO: Mapping = MappingProxyType({
    K.CompleteK: (("n",), {}, "complete graph K_n"),
    K.CycleC: (("n",), {}, "cycle C_n"),
    K.PathP: (("n",), {}, "path P_n on n vertices, origin at an end"),
    K.GluedTreesG: (("n",), {}, "two depth-n binary trees glued at their leaves"),
    K.Hypercube: (("n",), {}, "n-cube"),
    K.Line: ((), {}, "infinite line, origin-symmetric strata"),
    K.Tchebichef1: (("m",), {}, "first-kind Chebyshev sequence (optional n strata)"),
    K.Tchebichef2: (("m",), {}, "second-kind Chebyshev sequence (optional n strata)"),
    K.HermiteFinite: (("n",), {}, "w_k = n-k+1, n+1 strata"),
    K.HermiteInfinite: ((), {}, "w_k = k"),
    K.Laguerre: ((), {"a": 1.0, "gamma": 0.0}, "w_k = a^2 k (k+gamma), a_{k+1} = 2ka"),
    K.StarLattice: ((), {"N": 3}, "star lattice with N infinite branches"),
    K.Comb2D: ((), {}, "two-dimensional comb"),
    K.VectorGraph: ((), {}, "seven-vertex vector graph"),
    K.AngularMomentum: (("n",), {}, "angular-momentum graph l = n"),
    K.Charlier: ((), {"a": 1.0, "d": 1.0}, "Charlier coefficients"),
    K.Meixner2: ((), {"a": 1.0, "delta": 0.5, "eta": 1.0}, "Meixner second-kind coefficients"),
    K.EllipticA: ((), {"a": 1.0, "k": 0.5}, "elliptic family A"),
    K.EllipticB: ((), {"a": 1.0, "k": 0.5}, "elliptic family B"),
    K.EllipticC: ((), {"k": 0.5}, "elliptic family C"),
    K.EllipticD: ((), {"k": 0.5}, "elliptic family D"),
    K.CarlitzF: ((), {"a": 1.0, "k": 0.5}, "Carlitz F"),
    K.CarlitzG: ((), {"a": 1.0, "k": 0.5}, "Carlitz G"),
    K.CarlitzGstar: ((), {"a": 1.0, "k": 0.5}, "Carlitz G*"),
    K.ProductClassA: (("n",), {"a": 1.0, "b": 0.0}, "n-fold product of a two-stratum factor"),
    K.ProductClassB: (("n",), {"a": 2.0, "b": 1.0}, "n-fold product of a three-stratum factor"),
})

_INTEGER_PARAMS = {"n", "m", "N"}
_FINITE_EXPLICIT = {K.CompleteK, K.CycleC, K.PathP, K.GluedTreesG, K.Hypercube, K.VectorGraph}


@dataclass(frozen=True)
class FamilySpec:
    """Family kind with named parameters; ``scale`` overrides the default."""

    kind: FamilyKind
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        kind = FamilyKind(self.kind)
        object.__setattr__(self, "kind", kind)
        required, defaults, _ = FAMILY_INFO[kind]
        merged = dict(defaults)
        merged.update(self.params)
        missing = [p for p in required if p not in merged]
        if missing:
            raise ParameterOutOfDomain(f"{kind.value} requires parameter(s) {', '.join(missing)}")
        for name in _INTEGER_PARAMS & merged.keys():
            v = merged[name]
            if v is not None:
                if float(v) != int(float(v)):
                    raise ParameterOutOfDomain(f"{name} must be an integer, got {v}")
                merged[name] = int(float(v))
        object.__setattr__(self, "params", MappingProxyType(merged))
        _check_domain(kind, merged)

    def __getitem__(self, name):
        return self.params[name]

    def get(self, name, default=None):
        return self.params.get(name, default)

    @property
    def scale(self) -> float:
        s = self.params.get("scale")
        return float(s) if s is not None else default_scale(self)

    @property
    def is_finite(self) -> bool:
        if self.kind in (K.Tchebichef1, K.Tchebichef2):
            return self.get("n") is not None
        return self.kind in _FINITE_EXPLICIT | {K.HermiteFinite, K.AngularMomentum, K.ProductClassA, K.ProductClassB}

    def label(self) -> str:
        items = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind.value}:{items}" if items else self.kind.value


def default_scale(spec: FamilySpec) -> float:
    """Hamiltonian prefactor matching each family's printed amplitude formulas."""
    kind, p = spec.kind, spec.params
    if kind is K.CompleteK:
        return 1.0 / (p["n"] - 1)
    if kind in (K.CycleC, K.PathP, K.Line, K.Tchebichef1):
        return 0.5
    if kind in (K.Hypercube, K.AngularMomentum):
        return 1.0 / p["n"]
    if kind is K.Comb2D:
        return 0.25
    return 1.0


def _check_domain(kind: FamilyKind, p: dict) -> None:
    def need(cond, msg):
        if not cond:
            raise ParameterOutOfDomain(f"{kind.value}: {msg}")

    if "scale" in p and p["scale"] is not None:
        need(float(p["scale"]) > 0, "scale must be positive")
    n = p.get("n")
    if kind is K.CompleteK:
        need(n >= 2, "n >= 2")
    elif kind is K.CycleC:
        need(n >= 3, "n >= 3")
    elif kind in (K.PathP, K.GluedTreesG, K.Hypercube, K.HermiteFinite, K.AngularMomentum,
                  K.ProductClassA, K.ProductClassB):
        need(n >= 1, "n >= 1")
    elif kind in (K.Tchebichef1, K.Tchebichef2):
        need(p["m"] >= 1, "m >= 1")
        need(n is None or n >= 1, "n >= 1")
    elif kind is K.Laguerre:
        need(p["a"] > 0, "a > 0")
        need(p["gamma"] > -1, "gamma > -1")
    elif kind is K.StarLattice:
        need(p["N"] >= 2, "N >= 2")
    elif kind is K.Charlier:
        need(p["a"] > 0 and p["d"] > 0, "a > 0 and d > 0")
    elif kind is K.Meixner2:
        need(p["a"] > 0, "a > 0")
        need(p["eta"] > -2, "eta > -2")
    elif kind in (K.EllipticA, K.EllipticB, K.EllipticC, K.EllipticD, K.CarlitzF, K.CarlitzG, K.CarlitzGstar):
        need(0 < p["k"] < 1, "0 < k < 1")
        if "a" in p:
            need(p["a"] > 0, "a > 0")
    if kind in (K.ProductClassA, K.ProductClassB):
        need(p["a"] > 0, "a > 0")
    if kind is K.GluedTreesG:
        need(n <= 20, "n <= 20")
    if kind is K.Hypercube:
        need(n <= 20, "n <= 20")


def _convert(value: str):
    try:
        f = float(value)
    except ValueError as exc:
        raise InputError(f"parameter value {value!r} is not a number") from exc
    return int(f) if f.is_integer() and "." not in value and "e" not in value.lower() else f


_ALIASES = {m.name.lower(): m for m in FamilyKind}
_ALIASES.update({m.value: m for m in FamilyKind})


def parse_family(text: str) -> FamilySpec:
    """Parse ``"kind:param=value,param=value"``, e.g. ``"laguerre:a=1,gamma=0.5"``."""
    text = text.strip()
    head, _, rest = text.partition(":")
    kind = _ALIASES.get(head.strip().lower())
    if kind is None:
        raise InputError(f"unknown family {head!r}; try one of {', '.join(m.value for m in FamilyKind)}")
    params = {}
    if rest.strip():
        for item in rest.split(","):
            name, eq, value = item.partition("=")
            name = name.strip()
            if not eq or not name:
                raise InputError(f"malformed parameter {item!r}; expected name=value")
            if name == "gamma" or name == "γ":
                name = "gamma"
            params[name] = _convert(value.strip())
    allowed = set(FAMILY_INFO[kind][0]) | set(FAMILY_INFO[kind][1]) | {"scale"}
    if kind in (K.Tchebichef1, K.Tchebichef2):
        allowed.add("n")
    unknown = set(params) - allowed
    if unknown:
        raise InputError(f"{kind.value} does not take parameter(s) {', '.join(sorted(unknown))}")
    return FamilySpec(kind, params)


# ---------------------------------------------------------------- graphs


def _glued_tree_edges(n: int) -> tuple:
    """Heap-numbered binary tree of depth n plus a mirrored tree sharing its leaves."""
    first_leaf = 2**n - 1
    offset = 2 ** (n + 1) - 1
    edges = []
    for h in range(first_leaf):
        for c in (2 * h + 1, 2 * h + 2):
            edges.append((h, c))
            other = c if c >= first_leaf else offset + c
            edges.append((offset + h, other))
    return edges, offset + first_leaf


def family_graph(spec: FamilySpec) -> Graph:
    """Explicit graph for finite families; the origin is vertex 0."""
    kind, p = spec.kind, spec.params
    if kind is K.CompleteK:
        n = p["n"]
        return build_graph(itertools.combinations(range(n), 2), 0, n)
    if kind is K.CycleC:
        n = p["n"]
        return build_graph(((i, (i + 1) % n) for i in range(n)), 0, n)
    if kind is K.PathP:
        n = p["n"]
        return build_graph(((i, i + 1) for i in range(n - 1)), 0, n)
    if kind is K.GluedTreesG:
        edges, total = _glued_tree_edges(p["n"])
        return build_graph(edges, 0, total)
    if kind is K.Hypercube:
        n = p["n"]
        edges = [(v, v ^ (1 << b)) for v in range(2**n) for b in range(n) if v < v ^ (1 << b)]
        return build_graph(edges, 0, 2**n)
    if kind is K.VectorGraph:
        edges = [(0, 1), (0, 2), (1, 2), (1, 3), (1, 4), (2, 5), (2, 6), (3, 4), (4, 5), (5, 6), (6, 3)]
        return build_graph(edges, 0, 7)
    raise UnsupportedFamily(f"{kind.value} has no explicit graph construction")


# ---------------------------------------------------------------- Jacobi sequences


def _const(c: float):
    return lambda k: np.full(np.shape(k), float(c))


def product_jacobi_classA(a: float, b: float, n: int, scale: float = 1.0) -> JacobiSeq:
    """n-fold product of the factor ``w_1 = a, a_1 = 0, a_2 = b``.

    ``w'_k = k (n - k + 1) a`` for ``k = 1..n`` and ``a'_k = (k - 1) b``.
    """
    if not a > 0 or int(n) != n or n < 1:
        raise ParameterOutOfDomain(f"class A needs a > 0 and integer n >= 1 (a={a}, n={n})")
    k = np.arange(1, n + 1)
    return JacobiSeq(k * (n - k + 1) * a, np.arange(n + 1) * b, scale, name=f"class-a:n={n}")


def product_jacobi_classB(a: float, b: float, n: int, scale: float = 1.0) -> JacobiSeq:
    """n-fold product of the factor ``w_1 = w_2 = a, a = (0, b, 2b)``.

    ``w'_{2k+1} = (2k+1)(n-k) a`` and ``w'_{2k} = k (2n-2k+1) a``, both equal to
    ``j (2n - j + 1) a / 2`` at ``j = 1..2n``; ``a'_{k+1} = k b`` for ``k = 0..2n``.
    """
    if not a > 0 or int(n) != n or n < 1:
        raise ParameterOutOfDomain(f"class B needs a > 0 and integer n >= 1 (a={a}, n={n})")
    j = np.arange(1, 2 * n + 1)
    return JacobiSeq(j * (2 * n - j + 1) * a / 2.0, np.arange(2 * n + 1) * b, scale, name=f"class-b:n={n}")


def _path_like(c2: float, strata: int, scale: float, name: str) -> JacobiSeq:
    return JacobiSeq(np.full(strata - 1, c2), np.zeros(strata), scale, name=name)


def family_jacobi(spec: FamilySpec) -> JacobiSeq:
    """Szego-Jacobi sequences of a family, with its default (or overridden) scale."""
    kind, p, s = spec.kind, spec.params, spec.scale
    name = spec.label()
    if kind is K.CompleteK:
        n = p["n"]
        return JacobiSeq([n - 1.0], [0.0, n - 2.0], s, name=name)
    if kind is K.CycleC:
        n = p["n"]
        m = n // 2
        if n % 2:
            w = [2.0] + [1.0] * (m - 1)
            a = [0.0] * m + [1.0]
        else:
            w = [2.0] + [1.0] * (m - 2) + [2.0] if m >= 2 else [2.0]
            a = [0.0] * (m + 1)
        return JacobiSeq(w, a, s, name=name)
    if kind is K.PathP:
        return _path_like(1.0, p["n"], s, name)
    if kind is K.GluedTreesG:
        return _path_like(2.0, 2 * p["n"] + 1, s, name)
    if kind is K.Hypercube:
        return product_jacobi_classA(1.0, 0.0, p["n"], s)
    if kind is K.Line:
        return JacobiSeq(lambda k: np.where(k == 1, 2.0, 1.0), _const(0), s, name=name)
    if kind in (K.Tchebichef1, K.Tchebichef2):
        c2 = 4.0 ** (p["m"] - 1)
        first = 2 * c2 if kind is K.Tchebichef1 else c2
        n = p.get("n")
        if n is None:
            return JacobiSeq(lambda k: np.where(k == 1, first, c2), _const(0), s, name=name)
        w = np.full(n - 1, c2)
        if n > 1:
            w[0] = first
        return JacobiSeq(w, np.zeros(n), s, name=name)
    if kind is K.HermiteFinite:
        n = p["n"]
        return JacobiSeq(np.arange(n, 0, -1.0), np.zeros(n + 1), s, name=name)
    if kind is K.HermiteInfinite:
        return JacobiSeq(lambda k: k.astype(float), _const(0), s, name=name)
    if kind is K.Laguerre:
        a, g = float(p["a"]), float(p["gamma"])
        return JacobiSeq(lambda k: a * a * k * (k + g), lambda k: 2.0 * (k - 1) * a, s, name=name)
    if kind is K.StarLattice:
        N = float(p["N"])
        return JacobiSeq(lambda k: np.where(k == 1, N, 1.0), _const(0), s, name=name)
    if kind is K.Comb2D:
        return JacobiSeq(lambda k: np.where(k == 1, 4.0, 2.0), _const(0), s, name=name)
    if kind is K.VectorGraph:
        return JacobiSeq([2.0, 2.0], [0.0, 1.0, 2.0], s, name=name)
    if kind is K.AngularMomentum:
        return product_jacobi_classB(2.0, 1.0, p["n"], s)
    if kind is K.ProductClassA:
        return product_jacobi_classA(float(p["a"]), float(p["b"]), p["n"], s)
    if kind is K.ProductClassB:
        return product_jacobi_classB(float(p["a"]), float(p["b"]), p["n"], s)
    return _appendix_jacobi(spec)


def _appendix_jacobi(spec: FamilySpec) -> JacobiSeq:
    kind, p, s, name = spec.kind, spec.params, spec.scale, spec.label()
    a = float(p.get("a", 1.0))
    kk = float(p.get("k", 0.5))
    k2 = kk * kk
    # alpha callables receive the 1-based index k; the printed formulas give alpha_{n+1}, n = k - 1
    if kind is K.Charlier:
        d = float(p["d"])
        return JacobiSeq(lambda k: a * a * k * d, lambda k: (k - 1.0) * a, s, name=name)
    if kind is K.Meixner2:
        dl, eta = float(p["delta"]), float(p["eta"])
        return JacobiSeq(lambda k: a * a * k * (k + eta + 1) * (dl * dl + 1), lambda k: 2 * a * (k - 1.0) * dl, s, name=name)
    if kind is K.EllipticA:
        return JacobiSeq(lambda k: 4 * a * a * k**2 * (4.0 * k**2 - 1) * k2,
                         lambda k: 4 * a * (k - 1.0) * k * (1 + k2), s, name=name)
    if kind is K.EllipticB:
        return JacobiSeq(lambda k: 4 * a * a * k * (k + 1.0) * (2 * k + 1.0) ** 2 * k2,
                         lambda k: 4 * a * (k - 1.0) * (k + 1.0) * (1 + k2), s, name=name)
    if kind is K.EllipticC:
        return JacobiSeq(lambda k: np.where(k % 2 == 1, 1.0, k2) * k.astype(float) ** 2, _const(0), s, name=name)
    if kind is K.EllipticD:
        return JacobiSeq(lambda k: np.where(k % 2 == 1, k2, 1.0) * k.astype(float) ** 2, _const(0), s, name=name)
    if kind is K.CarlitzF:
        return JacobiSeq(lambda k: 4 * a * a * k**2 * (2.0 * k - 1) ** 2 * k2,
                         lambda k: 4 * a * (k - 1.0) * ((k - 1.0) * (1 + k2) + 1), s, name=name)
    if kind is K.CarlitzG:
        return JacobiSeq(lambda k: 4 * a * a * k**2 * (2.0 * k - 1) ** 2 * k2,
                         lambda k: 4 * a * (k - 1.0) * ((k - 1.0) * (1 + k2) + k2), s, name=name)
    if kind is K.CarlitzGstar:
        return JacobiSeq(lambda k: 4 * a * a * k**2 * (2.0 * k + 1) ** 2 * k2,
                         lambda k: 4 * a * (k - 1.0) * k * (1 + k2), s, name=name)
    raise UnsupportedFamily(f"no Jacobi sequence for {kind.value}")  # pragma: no cover


# ---------------------------------------------------------------- measures


def _arcsine(radius: float, name: str) -> ContinuousMeasure:
    r = float(radius)
    kappa = 1.0 / (math.pi * math.sqrt(2 * r))
    return ContinuousMeasure(
        lambda x: 1.0 / (math.pi * np.sqrt(np.maximum(r * r - np.asarray(x) ** 2, 0.0))),
        (-r, r), True, ((-r, kappa, -0.5), (r, kappa, -0.5)), name=name,
    )


def _semicircle(radius: float, name: str) -> ContinuousMeasure:
    r = float(radius)
    kappa = 2.0 * math.sqrt(2 * r) / (math.pi * r * r)
    return ContinuousMeasure(
        lambda x: 2.0 / (math.pi * r * r) * np.sqrt(np.maximum(r * r - np.asarray(x) ** 2, 0.0)),
        (-r, r), False, ((-r, kappa, 0.5), (r, kappa, 0.5)), name=name,
    )


def _sine_atoms(c: float, strata: int) -> DiscreteMeasure:
    th = np.arange(1, strata + 1) * np.pi / (strata + 1)
    return DiscreteMeasure(2 * c * np.cos(th), 2.0 / (strata + 1) * np.sin(th) ** 2)


def star_measure(N: float) -> ContinuousMeasure:
    """Star lattice: density on [-2, 2] plus two atoms at +-N/sqrt(N-1) when N > 2."""
    N = float(N)
    if N == 2:
        return _arcsine(2.0, "star:N=2")

    def rho(x):
        x = np.asarray(x, dtype=float)
        return N * np.sqrt(np.maximum(4 - x * x, 0.0)) / (2 * math.pi * (N * N - (N - 1) * x * x))

    kappa = N / (math.pi * (N - 2) ** 2)
    xa = N / math.sqrt(N - 1)
    wa = (N - 2) / (2 * (N - 1))
    return ContinuousMeasure(rho, (-2.0, 2.0), False, ((-2.0, kappa, 0.5), (2.0, kappa, 0.5)),
                             ((-xa, wa), (xa, wa)), name=f"star:N={N:g}")


def closed_form_measure(spec: FamilySpec):
    """Printed spectral measure of a family (discrete or continuous)."""
    kind, p = spec.kind, spec.params
    if kind is K.CompleteK:
        n = p["n"]
        return DiscreteMeasure([-1.0, n - 1.0], [(n - 1) / n, 1.0 / n])
    if kind is K.CycleC:
        n = p["n"]
        m = n // 2
        x = [2.0] + [2 * math.cos(2 * math.pi * l / n) for l in range(1, (n - 1) // 2 + 1)]
        w = [1.0 / n] + [2.0 / n] * ((n - 1) // 2)
        if n % 2 == 0:
            x.append(-2.0)
            w.append(1.0 / n)
        assert len(x) == m + 1
        return DiscreteMeasure(x, w)
    if kind is K.PathP:
        return _sine_atoms(1.0, p["n"])
    if kind is K.GluedTreesG:
        return _sine_atoms(math.sqrt(2.0), 2 * p["n"] + 1)
    if kind is K.Hypercube:
        n = p["n"]
        j = np.arange(n + 1)
        return DiscreteMeasure(n - 2.0 * j, comb(n, j) / 2.0**n)
    if kind is K.Line:
        return _arcsine(2.0, "line")
    if kind in (K.Tchebichef1, K.Tchebichef2):
        r = 2.0 ** p["m"]
        n = p.get("n")
        if kind is K.Tchebichef1:
            if n is None:
                return _arcsine(r, spec.label())
            phi = (2 * np.arange(n) + 1) * np.pi / (2 * n)
            return DiscreteMeasure(r * np.cos(phi), np.full(n, 1.0 / n))
        if n is None:
            return _semicircle(r, spec.label())
        return _sine_atoms(r / 2, n)
    if kind is K.HermiteFinite:
        n = p["n"]
        nodes = jacobi_to_quadrature(family_jacobi(spec)).nodes
        return DiscreteMeasure(nodes, np.full(n + 1, 1.0 / (n + 1)))
    if kind is K.HermiteInfinite:
        return ContinuousMeasure(lambda x: np.exp(-0.5 * np.asarray(x) ** 2) / math.sqrt(2 * math.pi),
                                 (-np.inf, np.inf), name="hermite")
    if kind is K.Laguerre:
        a, g = float(p["a"]), float(p["gamma"])
        b = -a * (1 + g)
        norm = a ** (g + 1) * math.gamma(g + 1)

        def rho(x):
            y = np.maximum(np.asarray(x, dtype=float) - b, 0.0)
            return y**g * np.exp(-y / a) / norm

        return ContinuousMeasure(rho, (b, np.inf), g < 0, ((b, 1.0 / norm, g),), name=spec.label())
    if kind is K.StarLattice:
        return star_measure(p["N"])
    if kind is K.Comb2D:
        return _arcsine(2 * math.sqrt(2.0), "comb")
    if kind is K.VectorGraph:
        r5 = math.sqrt(5.0)
        return DiscreteMeasure([1 - r5, 1.0, 1 + r5], [(3 + r5) / 10, 0.4, (3 - r5) / 10])
    raise NoClosedFormMeasure(f"{kind.value} has no closed-form measure; use jacobi_to_quadrature")
