"""Dense ground truth: ``exp(-i s A t)|o>`` by real-symmetric eigendecomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EigenSolverFailure, GraphTooLarge
from .graph_core import Graph, Stratification

__all__ = ["DenseEvolution", "dense_evolve", "stratum_project", "DEFAULT_CAP"]

DEFAULT_CAP = 4096


@dataclass(frozen=True)
class DenseEvolution:
    """Eigenpairs of the adjacency matrix and the origin's coordinates in that basis."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    origin_coords: np.ndarray

    @classmethod
    def from_graph(cls, g: Graph, cap: int = DEFAULT_CAP) -> "DenseEvolution":
        if g.vertex_count > cap:
            raise GraphTooLarge(f"{g.vertex_count} vertices exceed the dense cap {cap}")
        try:
            lam, vec = np.linalg.eigh(g.adjacency())
        except np.linalg.LinAlgError as exc:
            raise EigenSolverFailure(str(exc)) from exc
        return cls(lam, vec, vec[g.origin].copy())

    def state(self, scale: float, t):
        """``psi(t)``; a vector for scalar ``t``, rows per time for an array."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        phases = np.exp(-1j * scale * np.multiply.outer(t_arr, self.eigenvalues))
        psi = (phases * self.origin_coords) @ self.eigenvectors.T
        return psi if np.ndim(t) else psi[0]

    def evolve(self, psi, scale: float, t: float) -> np.ndarray:
        """``exp(-i scale A t) psi`` for an arbitrary vertex vector."""
        psi = np.asarray(psi, dtype=complex)
        if psi.shape != (self.eigenvalues.size,):
            raise DimensionMismatch(f"state of length {psi.size} for {self.eigenvalues.size} vertices")
        coords = self.eigenvectors.T @ psi
        return self.eigenvectors @ (np.exp(-1j * scale * t * self.eigenvalues) * coords)


def dense_evolve(g: Graph, scale: float, t, cap: int = DEFAULT_CAP):
    """``exp(-i scale A t) e_origin`` on an explicit graph."""
    return DenseEvolution.from_graph(g, cap).state(scale, t)


def stratum_project(psi, s: Stratification) -> np.ndarray:
    """``q_k = |V_k|^{-1/2} sum_{i in V_k} psi_i`` (last axis indexes vertices)."""
    psi = np.asarray(psi)
    if psi.shape[-1] != len(s.distances):
        raise DimensionMismatch(f"state of length {psi.shape[-1]} for {len(s.distances)} vertices")
    out = np.stack([psi[..., list(layer)].sum(axis=-1) / math.sqrt(len(layer)) for layer in s.strata], axis=-1)
    return out
