from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctqw import (AsymptoticForm, ContinuousMeasure, InputError, ParameterOutOfDomain,
                  UnsupportedEdgeBehavior, WindowTooShort, amplitude_closed_form, closed_form_measure,
                  closed_form_series, family_jacobi, finite_infinite_diff, fit_power_law,
                  laguerre_asymptotic, parse_family, pi_table, quadrature_series,
                  stationary_phase_edge, wkb_validate)
from ctqw.asymptotics import envelope

G32 = math.gamma(1.5)


def test_line_form():
    # q_0 = J_0(2t) at unit scale
    f = stationary_phase_edge(closed_form_measure(parse_family("line")), 1.0)
    assert f.amplitude_coeff == pytest.approx(1 / math.sqrt(math.pi))
    assert (f.decay_exponent, f.frequency) == (0.5, 2.0)
    assert f.phase_offset == pytest.approx(math.pi / 4)


def test_comb_form():
    spec = parse_family("comb")
    f = stationary_phase_edge(closed_form_measure(spec), spec.scale)
    assert f.amplitude_coeff == pytest.approx(math.sqrt(2 * math.sqrt(2) / math.pi))
    assert f.frequency == pytest.approx(1 / math.sqrt(2))
    assert f.phase_offset == pytest.approx(math.pi / 4)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_star_form(N):
    # square-root edges: p = 3/2, coefficient 2 N Gamma(3/2) / (pi (N-2)^2), plus two atoms
    f = stationary_phase_edge(closed_form_measure(parse_family(f"star:N={N}")), 1.0)
    assert f.decay_exponent == 1.5 and f.frequency == 2.0
    assert f.amplitude_coeff == pytest.approx(2 * N * G32 / (math.pi * (N - 2) ** 2))
    assert f.phase_offset == pytest.approx(3 * math.pi / 4)
    assert len(f.atoms) == 2
    assert sum(w for _, w in f.atoms) == pytest.approx((N - 2) / (N - 1))


def test_star_printed_coefficient_differs():
    f = stationary_phase_edge(closed_form_measure(parse_family("star:N=3")), 1.0)
    printed = 12 * G32 / math.pi
    assert f.amplitude_coeff == pytest.approx(printed / 2)


def test_edge_errors():
    with pytest.raises(UnsupportedEdgeBehavior):
        stationary_phase_edge(closed_form_measure(parse_family("laguerre")), 1.0)
    with pytest.raises(UnsupportedEdgeBehavior):
        stationary_phase_edge(closed_form_measure(parse_family("complete:n=3")), 1.0)
    lopsided = ContinuousMeasure(lambda x: 0.75 * (1 - x**2), (-1.0, 1.0),
                                 edges=((-1.0, 1.5, 1.0), (1.0, 1.0, 1.0)))
    with pytest.raises(UnsupportedEdgeBehavior):
        stationary_phase_edge(lopsided, 1.0)


def test_form_invariants():
    with pytest.raises(InputError):
        AsymptoticForm(0.0, 0.5, 1.0, 0.0)
    with pytest.raises(InputError):
        AsymptoticForm(1.0, -0.5, 1.0, 0.0)


def test_laguerre_form():
    f = laguerre_asymptotic(1.0, 0.0, 0)
    assert f.modulus_only and f.amplitude_coeff == 1.0 and f.decay_exponent == 1.0
    t = np.array([1e2, 1e3, 1e4])
    exact = np.abs(amplitude_closed_form(parse_family("laguerre:a=1,gamma=0"), 0, t)) * t
    assert np.all(np.diff(np.abs(exact - 1)) < 0) and abs(exact[-1] - 1) < 1e-8
    g = laguerre_asymptotic(0.5, 1.5, 2)
    assert g.amplitude_coeff == pytest.approx(math.sqrt(math.gamma(4.5) / (2 * math.gamma(2.5))) * 0.5**-2.5)
    with pytest.raises(ParameterOutOfDomain):
        laguerre_asymptotic(1.0, -2.0, 0)


def test_pi_examples():
    assert finite_infinite_diff(600, 1000.0) < 1e-6
    assert finite_infinite_diff(50, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert finite_infinite_diff(10, 100.0) > 0.1
    with pytest.raises(InputError):
        finite_infinite_diff(0, 1.0)


def test_pi_vectorized():
    t = np.linspace(0, 50, 7)
    assert np.allclose(finite_infinite_diff(20, t), [finite_infinite_diff(20, x) for x in t])


def test_pi_envelope_decreases_past_threshold():
    T = 200.0
    grid = np.arange(0, T, 0.05)
    ns = [70, 80, 100, 150, 200]  # all beyond T / pi ~ 64
    m = pi_table(ns, grid)
    assert np.all(np.diff(m) <= 1e-12)


@given(st.integers(1, 200), st.floats(0, 500))
def test_pi_bounded(n, t):
    assert 0 <= finite_infinite_diff(n, t) <= 2


def test_wkb_line():
    spec = parse_family("line:scale=1")
    t = np.arange(40, 210, 0.01)
    exact = closed_form_series(spec, 0, t)
    f = stationary_phase_edge(closed_form_measure(spec), 1.0)
    r = wkb_validate(exact, f, (50, 200))
    assert abs(r.C_fitted / r.C_theory - 1) < 0.02
    assert abs(r.p_fitted - 0.5) < 0.02
    assert r.max_err < 0.01


def test_wkb_hermite_self():
    t = np.linspace(0.5, 5, 200)
    s = closed_form_series(parse_family("hermite"), 0, t)
    r = wkb_validate(s, lambda x: amplitude_closed_form(parse_family("hermite"), 0, x), (0.5, 5))
    assert r.max_err == 0 and r.envelope_rel_err == 0


def test_wkb_laguerre_exponent():
    t = np.geomspace(100, 1000, 400)
    s = closed_form_series(parse_family("laguerre:a=1,gamma=0"), 0, t)
    r = wkb_validate(s, laguerre_asymptotic(1, 0, 0), (100, 1000))
    assert abs(r.p_fitted - 1) < 0.01


def test_window_too_short():
    spec = parse_family("line:scale=1")
    t = np.arange(50, 53, 0.01)
    f = stationary_phase_edge(closed_form_measure(spec), 1.0)
    with pytest.raises(WindowTooShort):
        wkb_validate(closed_form_series(spec, 0, t), f, (50, 53))


def test_hermite_rejects_power_law():
    t = np.geomspace(1, 6, 200)
    q = np.abs(amplitude_closed_form(parse_family("hermite"), 0, t))
    assert not fit_power_law(t, q).is_power_law()
    lag = np.abs(amplitude_closed_form(parse_family("laguerre"), 0, 10 * t))
    assert fit_power_law(10 * t, lag).is_power_law()


def test_envelope_locations():
    t = np.linspace(1, 100, 20000)
    y = t**-0.5 * np.cos(3 * t)
    c, e = envelope(t, y, 5, 95, 2 * math.pi / 3)
    assert c.size > 150
    # maxima of t^-1/2 |cos 3t| sit slightly before the cosine peaks
    assert np.allclose(e, c**-0.5, rtol=2e-3)
    fit = fit_power_law(c, e)
    assert abs(fit.slope + 0.5) < 0.01


def test_star_corrected_envelope():
    spec = parse_family("star:N=4")
    t = np.arange(40, 260, 0.02)
    s = quadrature_series(family_jacobi(spec), 0, t)
    r = wkb_validate(s, stationary_phase_edge(closed_form_measure(spec), 1.0), (50, 250))
    assert abs(r.p_fitted - 1.5) < 0.02
    assert r.envelope_rel_err < 0.05
