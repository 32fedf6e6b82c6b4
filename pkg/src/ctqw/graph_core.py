"""Explicit graphs, distance stratification and Jacobi coefficient extraction.

A graph with a distinguished origin ``o`` is split into strata
``V_k = {i : d(o, i) = k}``.  When every vertex of a stratum has the same
number of neighbours one stratum down, in its own stratum and one stratum
up, the adjacency matrix acts tridiagonally on the normalized stratum
vectors ``phi_k = |V_k|^{-1/2} sum_{i in V_k} |i>``::

    A phi_k = sqrt(w_{k+1}) phi_{k+1} + a_{k+1} phi_k + sqrt(w_k) phi_{k-1}

with ``w_k = (|V_k| / |V_{k-1}|) * kdown(V_k)**2`` and ``a_{k+1} = kwithin(V_k)``.
Indices of ``w`` and ``a`` are 1-based throughout, matching the recurrence.
"""

from __future__ import annotations

import json
import os
import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    DisconnectedGraph,
    IndexOutOfRange,
    InputError,
    NotQDGraph,
    SelfLoop,
    TruncationTooLarge,
)

__all__ = [
    "Graph",
    "Stratification",
    "JacobiSeq",
    "build_graph",
    "stratify",
    "extract_jacobi",
    "apply_adjacency",
    "load_graph",
    "save_graph",
    "adjacency_triplets",
]


@dataclass(frozen=True)
class Graph:
    """Simple undirected connected graph with an origin vertex."""

    vertex_count: int
    edges: frozenset
    origin: int = 0

    def __post_init__(self):
        n = self.vertex_count
        if n < 1:
            raise IndexOutOfRange(f"vertex_count must be positive, got {n}")
        if not 0 <= self.origin < n:
            raise IndexOutOfRange(f"origin {self.origin} outside 0..{n - 1}")
        for i, j in self.edges:
            if i == j:
                raise SelfLoop(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise IndexOutOfRange(f"edge ({i}, {j}) outside 0..{n - 1}")
            if i > j:
                raise InputError("edges must be stored as (min, max) pairs; use build_graph")
        seen = self._bfs_distances()
        missing = [v for v in range(n) if seen[v] < 0]
        if missing:
            raise DisconnectedGraph(
                f"{len(missing)} vertices unreachable from origin {self.origin} (first: {missing[0]})"
            )

    @cached_property
    def neighbors(self) -> tuple:
        nb = [[] for _ in range(self.vertex_count)]
        for i, j in self.edges:
            nb[i].append(j)
            nb[j].append(i)
        return tuple(tuple(sorted(x)) for x in nb)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(x) for x in self.neighbors], dtype=int)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Sorted ``(m, 2)`` integer array of edges."""
        if not self.edges:
            return np.zeros((0, 2), dtype=int)
        return np.array(sorted(self.edges), dtype=int)

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix."""
        a = np.zeros((self.vertex_count, self.vertex_count))
        e = self.edge_array
        a[e[:, 0], e[:, 1]] = 1.0
        a[e[:, 1], e[:, 0]] = 1.0
        return a

    def _bfs_distances(self) -> list:
        dist = [-1] * self.vertex_count
        nb = [[] for _ in range(self.vertex_count)]
        for i, j in self.edges:
            nb[i].append(j)
            nb[j].append(i)
        dist[self.origin] = 0
        queue = deque([self.origin])
        while queue:
            u = queue.popleft()
            for v in nb[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist


def build_graph(edge_list: Iterable[Sequence[int]], origin: int = 0, n: int | None = None) -> Graph:
    """Build a :class:`Graph` from vertex pairs.

    Duplicate and reversed pairs collapse to one edge.  ``n`` defaults to
    one more than the largest index mentioned (or ``origin + 1``).
    """
    pairs = set()
    top = origin
    for e in edge_list:
        if len(e) != 2:
            raise InputError(f"edge {e!r} is not a vertex pair")
        i, j = int(e[0]), int(e[1])
        if i < 0 or j < 0:
            raise IndexOutOfRange(f"negative vertex index in edge ({i}, {j})")
        if i == j:
            raise SelfLoop(f"self-loop at vertex {i}")
        pairs.add((min(i, j), max(i, j)))
        top = max(top, i, j)
    if n is None:
        n = top + 1
    elif top >= n:
        raise IndexOutOfRange(f"vertex index {top} outside 0..{n - 1}")
    return Graph(int(n), frozenset(pairs), int(origin))


@dataclass(frozen=True)
class Stratification:
    """Distance partition from the origin."""

    strata: tuple
    distances: tuple

    @property
    def sizes(self) -> list:
        return [len(s) for s in self.strata]

    @property
    def depth(self) -> int:
        """Number of strata."""
        return len(self.strata)

    def stratum_of(self, vertex: int) -> int:
        if not 0 <= vertex < len(self.distances):
            raise IndexOutOfRange(f"vertex {vertex} outside 0..{len(self.distances) - 1}")
        return self.distances[vertex]


def stratify(g: Graph) -> Stratification:
    """BFS layers from the origin, ascending vertex order inside each layer."""
    dist = g._bfs_distances()
    layers = [[] for _ in range(max(dist) + 1)]
    for v, d in enumerate(dist):
        layers[d].append(v)
    return Stratification(tuple(tuple(layer) for layer in layers), tuple(dist))


Coeffs = Union[Sequence[float], np.ndarray, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True, eq=False)
class JacobiSeq:
    """Szego-Jacobi sequences ``w_1, w_2, ...`` and ``a_1, a_2, ...`` with a scale.

    Finite sequences hold ``length`` strata: ``w_1..w_{length-1}`` and
    ``a_1..a_length``.  Infinite ones are generated lazily by vectorized
    callables ``k -> value`` taking a 1-based integer array.  The walk
    Hamiltonian is ``scale * A``.
    """

    omega: Coeffs
    alpha: Coeffs
    scale: float = 1.0
    length: int | None = None
    name: str = ""
    _omega_arr: np.ndarray | None = field(default=None, init=False, repr=False)
    _alpha_arr: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise InputError(f"scale must be positive, got {self.scale}")
        if callable(self.omega) != callable(self.alpha):
            raise InputError("omega and alpha must both be sequences or both callables")
        if callable(self.omega):
            if self.length is not None:
                raise InputError("callable coefficients describe an infinite sequence")
            return
        w = np.asarray(self.omega, dtype=float).reshape(-1)
        a = np.asarray(self.alpha, dtype=float).reshape(-1)
        n = len(a)
        if n < 1:
            raise InputError("at least one stratum (alpha_1) is required")
        if len(w) != n - 1:
            raise InputError(f"{n} strata need {n - 1} omegas, got {len(w)}")
        if self.length is not None and self.length != n:
            raise InputError(f"length {self.length} disagrees with {n} alphas")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise InputError("omega_k must be positive and finite within the length")
        if np.any(~np.isfinite(a)):
            raise InputError("alpha_k must be finite")
        w.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "_omega_arr", w)
        object.__setattr__(self, "_alpha_arr", a)
        object.__setattr__(self, "length", n)

    @property
    def is_finite(self) -> bool:
        return self.length is not None

    def omegas(self, n: int) -> np.ndarray:
        """``w_1..w_n``; zero beyond a finite length."""
        if n <= 0:
            return np.zeros(0)
        if self.is_finite:
            out = np.zeros(n)
            m = min(n, len(self._omega_arr))
            out[:m] = self._omega_arr[:m]
            return out
        k = np.arange(1, n + 1)
        out = np.broadcast_to(np.asarray(self.omega(k), dtype=float), (n,)).copy()
        if np.any(out <= 0) or np.any(~np.isfinite(out)):
            bad = int(np.flatnonzero((out <= 0) | ~np.isfinite(out))[0]) + 1
            raise InputError(f"generated omega_{bad} = {out[bad - 1]} is not positive")
        return out

    def alphas(self, n: int) -> np.ndarray:
        """``a_1..a_n``; zero beyond a finite length."""
        if n <= 0:
            return np.zeros(0)
        if self.is_finite:
            out = np.zeros(n)
            m = min(n, len(self._alpha_arr))
            out[:m] = self._alpha_arr[:m]
            return out
        k = np.arange(1, n + 1)
        return np.broadcast_to(np.asarray(self.alpha(k), dtype=float), (n,)).copy()

    def tridiagonal(self, n: int | None = None) -> tuple:
        """Diagonal and off-diagonal of the ``n x n`` Jacobi matrix (unscaled)."""
        n = self._check_order(n)
        return self.alphas(n), np.sqrt(self.omegas(n - 1))

    def truncate(self, n: int) -> "JacobiSeq":
        """Finite sequence made of the first ``n`` strata."""
        n = self._check_order(n)
        return JacobiSeq(self.omegas(n - 1), self.alphas(n), self.scale, name=self.name)

    def with_scale(self, scale: float) -> "JacobiSeq":
        if self.is_finite:
            return JacobiSeq(self._omega_arr, self._alpha_arr, scale, name=self.name)
        return JacobiSeq(self.omega, self.alpha, scale, name=self.name)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """Unscaled Jacobi matrix of size ``len(v)`` applied to ``v``."""
        v = np.asarray(v)
        n = v.shape[0]
        d, e = self.tridiagonal(n)
        out = d * v
        out[:-1] += e * v[1:]
        out[1:] += e * v[:-1]
        return out

    def _check_order(self, n: int | None) -> int:
        if n is None:
            if not self.is_finite:
                raise InputError("an explicit order is required for an infinite sequence")
            return self.length
        n = int(n)
        if n < 1:
            raise InputError(f"order must be at least 1, got {n}")
        if self.is_finite and n > self.length:
            raise TruncationTooLarge(f"order {n} exceeds the {self.length} available strata")
        return n

    def __repr__(self):
        kind = f"length={self.length}" if self.is_finite else "infinite"
        label = f"{self.name}, " if self.name else ""
        return f"JacobiSeq({label}{kind}, scale={self.scale:g})"


def _stratum_degrees(g: Graph, s: Stratification) -> list:
    """Per stratum, arrays of (down, within, up) degree counts for each vertex."""
    dist = s.distances
    out = []
    for k, layer in enumerate(s.strata):
        rows = []
        for v in layer:
            down = within = up = 0
            for u in g.neighbors[v]:
                d = dist[u] - k
                if d == -1:
                    down += 1
                elif d == 0:
                    within += 1
                elif d == 1:
                    up += 1
                else:  # impossible for BFS layers; guards against hand-built inputs
                    raise InputError(f"edge ({v}, {u}) spans strata {k} and {dist[u]}")
            rows.append((down, within, up))
        out.append(np.array(rows, dtype=int).reshape(-1, 3))
    return out


def extract_jacobi(g: Graph, s: Stratification | None = None) -> JacobiSeq:
    """Quantum-decomposition coefficients of a QD graph.

    Raises :class:`NotQDGraph` when a stratum has vertices with different
    downward, within-stratum or upward degrees.
    """
    if s is None:
        s = stratify(g)
    if len(s.distances) != g.vertex_count:
        raise DimensionMismatch("stratification does not match the graph")
    degs = _stratum_degrees(g, s)
    for k, rows in enumerate(degs):
        for col, which in enumerate(("down", "within", "up")):
            bad = np.flatnonzero(rows[:, col] != rows[0, col])
            if bad.size:
                layer = s.strata[k]
                i = int(bad[0])
                raise NotQDGraph(k, layer[0], layer[i], which, int(rows[0, col]), int(rows[i, col]))
    sizes = s.sizes
    alpha = [float(rows[0, 1]) for rows in degs]
    omega = [sizes[k] / sizes[k - 1] * float(degs[k][0, 0]) ** 2 for k in range(1, len(sizes))]
    for k, size in enumerate(sizes):
        a = alpha[k]
        if size - 1 < a:
            warnings.warn(f"stratum {k}: within-degree {a:g} exceeds |V_k|-1 = {size - 1}")
        if (size * a) % 2:
            warnings.warn(f"stratum {k}: |V_k|*alpha = {size * a:g} is odd")
    return JacobiSeq(omega, alpha, 1.0)


def apply_adjacency(g: Graph, v) -> np.ndarray:
    """``A v`` for the 0/1 adjacency matrix."""
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] != g.vertex_count:
        raise DimensionMismatch(f"vector of shape {v.shape} for {g.vertex_count} vertices")
    out = np.zeros_like(v, dtype=np.result_type(v.dtype, float))
    e = g.edge_array
    if len(e):
        np.add.at(out, e[:, 0], v[e[:, 1]])
        np.add.at(out, e[:, 1], v[e[:, 0]])
    return out


def load_graph(path: str | os.PathLike) -> Graph:
    """Read ``{"n": int, "edges": [[i, j], ...], "origin": int}``."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict) or "edges" not in data:
        raise InputError(f"{path}: expected an object with an 'edges' list")
    return build_graph(data["edges"], int(data.get("origin", 0)), data.get("n"))


def save_graph(g: Graph, path: str | os.PathLike) -> None:
    data = {"n": g.vertex_count, "edges": g.edge_array.tolist(), "origin": g.origin}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh)


def adjacency_triplets(g: Graph) -> str:
    """CSV ``i,j,1`` lines, both orientations, sorted."""
    rows = []
    for i, j in g.edge_array:
        rows.append((int(i), int(j)))
        rows.append((int(j), int(i)))
    rows.sort()
    return "".join(f"{i},{j},1\n" for i, j in rows)
