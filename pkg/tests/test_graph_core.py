from __future__ import annotations

import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import connected_graphs
from ctqw import (DimensionMismatch, DisconnectedGraph, IndexOutOfRange, InputError, JacobiSeq,
                  NotQDGraph, SelfLoop, TruncationTooLarge, apply_adjacency, build_graph,
                  extract_jacobi, family_graph, load_graph, parse_family, save_graph, stratify)
from ctqw.graph_core import adjacency_triplets


def cycle(n):
    return build_graph([(i, (i + 1) % n) for i in range(n)])


def test_triangle():
    g = build_graph([(0, 1), (1, 2), (0, 2)])
    assert g.vertex_count == 3
    assert list(g.degrees) == [2, 2, 2]


def test_path_three():
    g = build_graph([(0, 1), (1, 2)])
    assert g.edges == frozenset({(0, 1), (1, 2)})
    assert stratify(g).sizes == [1, 1, 1]


def test_duplicates_collapse():
    g = build_graph([(0, 1), (1, 0), (0, 1)])
    assert len(g.edges) == 1


@pytest.mark.parametrize("edges, exc", [
    ([(0, 1), (2, 3)], DisconnectedGraph),
    ([(0, 0)], SelfLoop),
    ([(0, -1)], IndexOutOfRange),
])
def test_build_errors(edges, exc):
    with pytest.raises(exc):
        build_graph(edges)


def test_index_beyond_n():
    with pytest.raises(IndexOutOfRange):
        build_graph([(0, 5)], n=3)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        build_graph([(1, 1)])


@pytest.mark.parametrize("g, sizes", [
    (build_graph([(i, j) for i in range(4) for j in range(i + 1, 4)]), [1, 3]),
    (cycle(5), [1, 2, 2]),
    (family_graph(parse_family("hypercube:n=3")), [1, 3, 3, 1]),
])
def test_stratify_sizes(g, sizes):
    assert stratify(g).sizes == sizes


def test_stratum_order_ascending():
    s = stratify(cycle(6))
    assert s.strata == ((0,), (1, 5), (2, 4), (3,))
    assert s.stratum_of(4) == 2


def test_complete_jacobi():
    for n in range(2, 8):
        g = family_graph(parse_family(f"complete:n={n}"))
        j = extract_jacobi(g)
        assert list(j.omegas(1)) == [n - 1]
        assert list(j.alphas(2)) == [0, n - 2]


def test_odd_cycle_jacobi():
    m = 4
    j = extract_jacobi(cycle(2 * m + 1))
    assert list(j.omegas(m)) == [2, 1, 1, 1]
    assert list(j.alphas(m + 1)) == [0, 0, 0, 0, 1]


def test_star_plus_edge_not_qd():
    g = build_graph([(0, 1), (0, 2), (0, 3), (1, 2)])
    with pytest.raises(NotQDGraph) as info:
        extract_jacobi(g)
    assert info.value.stratum == 1
    assert info.value.which == "within"
    assert set(info.value.vertices) <= {1, 2, 3}


def test_uneven_up_degree_not_qd():
    # stratum 1 = {1, 2}; only vertex 1 has a child
    g = build_graph([(0, 1), (0, 2), (1, 3)])
    with pytest.raises(NotQDGraph) as info:
        extract_jacobi(g)
    assert info.value.which == "up"


def test_no_spurious_constraint_warnings():
    # explicit graphs always satisfy the parity rule (handshake lemma)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for spec in ("complete:n=6", "cycle:n=9", "glued-trees:n=3", "vector"):
            extract_jacobi(family_graph(parse_family(spec)))


@pytest.mark.parametrize("g, v, out", [
    (build_graph([(0, 1)]), [1, 0], [0, 1]),
    (cycle(4), [1, 0, 0, 0], [0, 1, 0, 1]),
    (build_graph([(0, 1), (1, 2)]), [1, 1, 1], [1, 2, 1]),
])
def test_apply_adjacency(g, v, out):
    assert np.array_equal(apply_adjacency(g, np.array(v)), out)


def test_apply_adjacency_mismatch():
    with pytest.raises(DimensionMismatch):
        apply_adjacency(cycle(4), np.ones(3))


def test_graph_roundtrip(tmp_path):
    g = family_graph(parse_family("glued-trees:n=2"))
    save_graph(g, tmp_path / "g.json")
    assert load_graph(tmp_path / "g.json") == g


def test_load_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(InputError):
        load_graph(p)


def test_triplets():
    assert adjacency_triplets(build_graph([(0, 1), (1, 2)])) == "0,1,1\n1,0,1\n1,2,1\n2,1,1\n"


def test_jacobi_finite_validation():
    with pytest.raises(InputError):
        JacobiSeq([1.0, -1.0], [0, 0, 0])
    with pytest.raises(InputError):
        JacobiSeq([1.0], [0, 0, 0])
    with pytest.raises(TruncationTooLarge):
        JacobiSeq([1.0], [0, 0]).tridiagonal(3)


def test_jacobi_infinite_lazy():
    j = JacobiSeq(lambda k: k.astype(float), lambda k: 0 * k)
    assert not j.is_finite
    assert list(j.omegas(4)) == [1, 2, 3, 4]
    t = j.truncate(5)
    assert t.length == 5 and list(t.omegas(4)) == [1, 2, 3, 4]


@given(connected_graphs())
def test_strata_partition_and_locality(g):
    s = stratify(g)
    assert s.strata[0] == (g.origin,)
    flat = sorted(v for layer in s.strata for v in layer)
    assert flat == list(range(g.vertex_count))
    for i, j in g.edges:
        assert abs(s.distances[i] - s.distances[j]) <= 1
    assert stratify(g) == s


@given(connected_graphs())
def test_adjacency_symmetric_zero_diagonal(g):
    a = g.adjacency()
    assert np.array_equal(a, a.T)
    assert not np.any(np.diag(a))


@given(connected_graphs(), st.integers(0, 6))
def test_qd_moments_match_adjacency_powers(g, m):
    s = stratify(g)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            j = extract_jacobi(g, s)
    except NotQDGraph:
        return
    phi = [np.zeros(g.vertex_count) for _ in s.strata]
    for k, layer in enumerate(s.strata):
        phi[k][list(layer)] = 1 / np.sqrt(len(layer))
    v = phi[0].copy()
    e0 = np.zeros(j.length)
    e0[0] = 1
    w = e0.copy()
    for _ in range(m):
        v = apply_adjacency(g, v)
        w = j.matvec(w)
    direct = np.array([p @ v for p in phi])
    assert np.allclose(direct, w, atol=1e-12 * max(1.0, np.abs(w).max()))
