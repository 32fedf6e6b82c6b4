from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctqw import (DiscreteMeasure, DivergentFraction, InputError, JacobiSeq, TruncationTooLarge,
                  closed_form_measure, family_jacobi, gauss_weights, jacobi_moments,
                  jacobi_to_quadrature, parse_family, stieltjes_cf, stieltjes_inversion)
from ctqw.spectral import _gauss_weights_numpy

LINE = family_jacobi(parse_family("line"))
K2 = JacobiSeq([1.0], [0.0, 0.0])


@st.composite
def finite_jacobi(draw, max_len: int = 24):
    n = draw(st.integers(1, max_len))
    w = draw(st.lists(st.floats(0.05, 20), min_size=n - 1, max_size=n - 1))
    a = draw(st.lists(st.floats(-5, 5), min_size=n, max_size=n))
    return JacobiSeq(w, a)


@pytest.mark.parametrize("n", [1, 2, 5, 16, 64])
def test_line_chebyshev_nodes(n):
    m = jacobi_to_quadrature(LINE, n)
    x = np.sort(2 * np.cos((2 * np.arange(n) + 1) * np.pi / (2 * n)))
    assert np.allclose(m.nodes, x, atol=1e-13)
    assert np.allclose(m.weights, 1 / n, atol=1e-13)


def test_hermite_three():
    m = jacobi_to_quadrature(family_jacobi(parse_family("hermite-finite:n=3")))
    r = np.sqrt(6)
    x = np.sort([-math.sqrt(3 + r), -math.sqrt(3 - r), math.sqrt(3 - r), math.sqrt(3 + r)])
    assert np.allclose(m.nodes, x) and np.allclose(m.weights, 0.25)


def test_k2():
    m = jacobi_to_quadrature(K2, 2)
    assert np.allclose(m.nodes, [-1, 1]) and np.allclose(m.weights, [0.5, 0.5])


def test_order_errors():
    with pytest.raises(TruncationTooLarge):
        jacobi_to_quadrature(K2, 3)
    with pytest.raises(InputError):
        jacobi_to_quadrature(LINE)


@pytest.mark.parametrize("j, z, val", [
    (K2, 2, 2 / 3),
    (family_jacobi(parse_family("vector")), 3, 0.0),
    (family_jacobi(parse_family("complete:n=3")), 3, 0.5),
])
def test_stieltjes_examples(j, z, val):
    assert abs(stieltjes_cf(j, z) - val) < 1e-14


def test_stieltjes_pole():
    with pytest.raises(DivergentFraction):
        stieltjes_cf(K2, 1.0)


def test_stieltjes_bad_depth():
    with pytest.raises(InputError):
        stieltjes_cf(K2, 2.0, depth=0)


def test_line_inversion():
    u = np.linspace(-1.9, 1.9, 39)
    rho = stieltjes_inversion(LINE, u)
    assert np.max(np.abs(rho - 1 / (np.pi * np.sqrt(4 - u**2)))) < 1e-3


def test_star_inversion():
    j = family_jacobi(parse_family("star:N=3"))
    u = np.linspace(-1.9, 1.9, 39)
    ref = 3 * np.sqrt(4 - u**2) / (2 * np.pi * (9 - 2 * u**2))
    assert np.max(np.abs(stieltjes_inversion(j, u) - ref)) < 1e-3


def test_inversion_outside_spectrum():
    assert np.all(np.abs(stieltjes_inversion(LINE, [5.0, -7.0, 40.0])) < 1e-6)


def test_inversion_bad_eps():
    with pytest.raises(InputError):
        stieltjes_inversion(LINE, [0.0], eps=0)


def test_discrete_measure_validation():
    with pytest.raises(InputError):
        DiscreteMeasure([0.0, 1.0], [0.5])
    with pytest.raises(InputError):
        DiscreteMeasure([0.0], [-1.0])
    m = DiscreteMeasure([2.0, -1.0], [0.25, 0.75])
    assert list(m.nodes) == [-1.0, 2.0]


def test_compiled_weights_match_numpy():
    for spec in ("laguerre", "hermite", "star:N=4", "charlier:a=1,d=2"):
        j = family_jacobi(parse_family(spec))
        d, e = j.tridiagonal(300)
        from scipy.linalg import eigh_tridiagonal
        x = np.sort(eigh_tridiagonal(d, e, eigvals_only=True))
        w1 = gauss_weights(d, e, x)
        w2 = _gauss_weights_numpy(d, e, x)
        assert np.allclose(w1 / w1.sum(), w2 / w2.sum(), rtol=1e-9, atol=1e-300)


def test_weights_agree_with_eigenvectors():
    from scipy.linalg import eigh_tridiagonal
    j = family_jacobi(parse_family("meixner2"))
    d, e = j.tridiagonal(40)
    x, v = eigh_tridiagonal(d, e)
    w = gauss_weights(d, e, x, accelerate=False)
    assert np.allclose(w / w.sum(), v[0] ** 2, atol=1e-14)


@given(finite_jacobi())
def test_weights_positive_normalized(j):
    m = jacobi_to_quadrature(j)
    assert np.all(m.weights > 0)
    assert abs(m.weights.sum() - 1) < 1e-12
    assert np.all(np.diff(m.nodes) > 0)


@given(finite_jacobi(12))
def test_quadrature_exactness(j):
    m = jacobi_to_quadrature(j)
    mom = jacobi_moments(j, 2 * m.size - 1)
    for p in range(2 * m.size):
        scale = float(np.sum(m.weights * np.abs(m.nodes) ** p))
        assert abs(m.moment(p) - mom[p]) <= 1e-10 * scale + 1e-300


@given(finite_jacobi(), st.floats(-10, 10), st.floats(0.1, 5))
def test_cf_matches_partial_fractions(j, re, im):
    z = complex(re, im)
    m = jacobi_to_quadrature(j)
    assert abs(stieltjes_cf(j, z) - m.stieltjes(z)) < 1e-10


@given(st.sampled_from(["line", "hermite", "laguerre", "star:N=3", "comb", "tchebichef2:m=2"]),
       st.floats(0.5, 8))
def test_order_convergence(text, t):
    j = family_jacobi(parse_family(text))
    n = max(64, math.ceil(8 * t * math.sqrt(max(j.omegas(8)))))
    q1 = jacobi_to_quadrature(j, n).fourier(j.scale * t)
    q2 = jacobi_to_quadrature(j, 2 * n).fourier(j.scale * t)
    assert abs(q1 - q2) < 1e-8
