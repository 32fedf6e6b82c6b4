from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctqw import (ContinuousMeasure, DiscreteMeasure, FamilyKind, FamilySpec, InputError,
                  NoClosedFormMeasure, ParameterOutOfDomain, UnsupportedFamily, closed_form_measure,
                  extract_jacobi, family_graph, family_jacobi, jacobi_to_quadrature, parse_family,
                  product_jacobi_classA, product_jacobi_classB, stratify)

EXPLICIT = ([f"complete:n={n}" for n in range(2, 11)] + [f"cycle:n={n}" for n in range(3, 13)]
            + [f"path:n={n}" for n in range(1, 13)] + [f"glued-trees:n={n}" for n in range(1, 6)]
            + [f"hypercube:n={n}" for n in range(1, 9)] + ["vector"])


def test_complete_four():
    g = family_graph(parse_family("complete:n=4"))
    assert g.vertex_count == 4 and len(g.edges) == 6


def test_glued_trees_count():
    g = family_graph(parse_family("glued-trees:n=4"))
    assert g.vertex_count == 2**5 + 2**4 - 2 == 46
    assert stratify(g).sizes == [1, 2, 4, 8, 16, 8, 4, 2, 1]


def test_hypercube_three():
    g = family_graph(parse_family("hypercube:n=3"))
    assert (g.vertex_count, len(g.edges)) == (8, 12)
    assert stratify(g).sizes == [1, 3, 3, 1]


def test_no_graph_for_infinite():
    with pytest.raises(UnsupportedFamily):
        family_graph(parse_family("line"))
    with pytest.raises(UnsupportedFamily):
        family_graph(parse_family("hermite-finite:n=3"))


@pytest.mark.parametrize("text", EXPLICIT)
def test_extracted_equals_printed(text):
    spec = parse_family(text)
    j1 = extract_jacobi(family_graph(spec))
    j2 = family_jacobi(spec)
    assert j1.length == j2.length
    assert np.array_equal(j1.omegas(j1.length - 1), j2.omegas(j2.length - 1))
    assert np.array_equal(j1.alphas(j1.length), j2.alphas(j2.length))


def test_line_jacobi():
    j = family_jacobi(parse_family("line"))
    assert list(j.omegas(5)) == [2, 1, 1, 1, 1]
    assert not np.any(j.alphas(5))


def test_hermite_finite_jacobi():
    j = family_jacobi(parse_family("hermite-finite:n=5"))
    assert list(j.omegas(5)) == [5, 4, 3, 2, 1]
    assert j.length == 6


def test_laguerre_jacobi():
    j = family_jacobi(parse_family("laguerre:a=1,gamma=0"))
    assert list(j.omegas(4)) == [1, 4, 9, 16]
    assert list(j.alphas(4)) == [0, 2, 4, 6]


def test_star_jacobi():
    j = family_jacobi(parse_family("star:N=5"))
    assert list(j.omegas(3)) == [5, 1, 1]


def test_charlier_jacobi():
    j = family_jacobi(parse_family("charlier:a=2,d=3"))
    assert list(j.omegas(3)) == [12, 24, 36]
    assert list(j.alphas(3)) == [0, 2, 4]


def test_class_a():
    j = product_jacobi_classA(1, 0, 3)
    assert list(j.omegas(3)) == [3, 4, 3] and not np.any(j.alphas(4))
    j = product_jacobi_classA(2, 1, 1)
    assert list(j.omegas(1)) == [2] and list(j.alphas(1)) == [0]
    assert product_jacobi_classA(1, 0, 8).omegas(4)[3] == 20


def test_class_a_matches_cube():
    for n in range(1, 9):
        g = family_graph(parse_family(f"hypercube:n={n}"))
        j = extract_jacobi(g)
        p = product_jacobi_classA(1, 0, n)
        assert np.array_equal(j.omegas(n), p.omegas(n))


def test_class_b():
    j = product_jacobi_classB(2, 1, 1)
    assert list(j.omegas(2)) == [2, 2] and list(j.alphas(3)) == [0, 1, 2]
    assert list(product_jacobi_classB(2, 1, 2).omegas(4)) == [4, 6, 6, 4]
    with pytest.raises(ParameterOutOfDomain):
        product_jacobi_classB(2, 1, 0)


def test_vector_is_class_b():
    v = family_jacobi(parse_family("vector"))
    b = product_jacobi_classB(2, 1, 1)
    assert np.array_equal(v.omegas(2), b.omegas(2)) and np.array_equal(v.alphas(3), b.alphas(3))


@pytest.mark.parametrize("text", [
    "laguerre:a=1,gamma=-1", "laguerre:a=0", "elliptic-a:k=1", "carlitz-f:k=0",
    "meixner2:eta=-2", "complete:n=1", "cycle:n=2", "class-a:n=0", "star:N=1", "hypercube:n=2.5",
])
def test_domain_errors(text):
    with pytest.raises(ParameterOutOfDomain):
        parse_family(text)


def test_parse_family():
    spec = parse_family("laguerre:a=1,gamma=0.5")
    assert spec.kind is FamilyKind.Laguerre and spec["gamma"] == 0.5
    assert parse_family("Cycle:n=7") == FamilySpec(FamilyKind.CycleC, {"n": 7})
    assert parse_family("cycle:n=7,scale=1").scale == 1.0
    assert parse_family("cycle:n=7").scale == 0.5
    with pytest.raises(InputError):
        parse_family("nonsense")
    with pytest.raises(InputError):
        parse_family("cycle:m=3")
    with pytest.raises(InputError):
        parse_family("cycle:n")


def test_default_scales():
    assert parse_family("complete:n=5").scale == 0.25
    assert parse_family("hypercube:n=4").scale == 0.25
    assert parse_family("comb").scale == 0.25
    assert parse_family("glued-trees:n=2").scale == 1.0


def test_complete_measure():
    m = closed_form_measure(parse_family("complete:n=5"))
    assert np.allclose(m.nodes, [-1, 4]) and np.allclose(m.weights, [0.8, 0.2])


def test_line_measure():
    m = closed_form_measure(parse_family("line"))
    assert isinstance(m, ContinuousMeasure)
    assert m.support == (-2.0, 2.0)
    x = np.array([-1.5, 0.0, 1.0])
    assert np.allclose(m.density(x), 1 / (np.pi * np.sqrt(4 - x**2)))


def test_star_two_is_line():
    s = closed_form_measure(parse_family("star:N=2"))
    ln = closed_form_measure(parse_family("line"))
    x = np.linspace(-1.9, 1.9, 9)
    assert np.allclose(s.density(x), ln.density(x)) and not s.atoms


def test_star_density_and_atoms():
    m = closed_form_measure(parse_family("star:N=3"))
    x = np.linspace(-1.9, 1.9, 7)
    assert np.allclose(m.density(x), 3 * np.sqrt(4 - x**2) / (2 * np.pi * (9 - 2 * x**2)))
    assert sorted(round(a, 12) for a, _ in m.atoms) == [round(-3 / math.sqrt(2), 12), round(3 / math.sqrt(2), 12)]


def test_vector_measure():
    m = closed_form_measure(parse_family("vector"))
    q = jacobi_to_quadrature(family_jacobi(parse_family("vector")))
    assert np.allclose(m.nodes, q.nodes) and np.allclose(m.weights, q.weights)


def test_no_measure():
    with pytest.raises(NoClosedFormMeasure):
        closed_form_measure(parse_family("charlier"))


@pytest.mark.parametrize("text", EXPLICIT + ["tchebichef1:m=2,n=7", "tchebichef2:m=2,n=6", "hermite-finite:n=4"])
def test_discrete_measures_match_quadrature(text):
    spec = parse_family(text)
    m = closed_form_measure(spec)
    q = jacobi_to_quadrature(family_jacobi(spec))
    assert isinstance(m, DiscreteMeasure)
    assert abs(m.weights.sum() - 1) < 1e-12
    for p in range(2 * q.size):
        scale = float(np.sum(q.weights * np.abs(q.nodes) ** p))
        assert abs(m.moment(p) - q.moment(p)) <= 1e-10 * scale + 1e-14


@pytest.mark.parametrize("text", ["line", "tchebichef1:m=2", "tchebichef2:m=3", "hermite", "laguerre",
                                  "laguerre:a=0.5,gamma=1.5", "star:N=3", "star:N=5", "comb"])
def test_continuous_measures_normalized(text):
    m = closed_form_measure(parse_family(text))
    assert abs(m.total_mass() - 1) < 1e-8


@pytest.mark.parametrize("text", ["line", "tchebichef2:m=2", "hermite", "laguerre:a=1,gamma=0.5", "star:N=4", "comb"])
def test_continuous_moments_match_jacobi(text):
    from ctqw import jacobi_moments
    spec = parse_family(text)
    m = closed_form_measure(spec)
    ref = jacobi_moments(family_jacobi(spec), 6)
    for p in range(7):
        assert m.moment(p) == pytest.approx(ref[p], rel=1e-7, abs=1e-8)


@given(st.floats(0.1, 3), st.floats(-2, 2), st.integers(1, 12))
def test_class_a_shape(a, b, n):
    j = product_jacobi_classA(a, b, n)
    k = np.arange(1, n + 1)
    assert j.length == n + 1
    assert np.allclose(j.omegas(n), k * (n - k + 1) * a)
    assert np.allclose(j.alphas(n + 1), np.arange(n + 1) * b)
