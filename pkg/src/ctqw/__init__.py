"""Continuous-time quantum walks on stratified (QD) graphs via spectral distributions.

A walk ``exp(-i s A t)`` started at an origin vertex stays in the span of the
uniform stratum states when the graph's strata are homogeneous.  The
amplitudes ``q_k(t)`` are then Fourier transforms of the spectral measure
against orthonormal polynomials built from Szego-Jacobi coefficients.
"""

from __future__ import annotations

from .amplitudes import (AmplitudeSeries, Method, amplitude_closed_form, amplitude_ode,
                         amplitude_quadrature, avg_probability, closed_form_series,
                         orthonormal_values, product_amplitude, quadrature_series, site_amplitude)
from .asymptotics import (AsymptoticForm, finite_infinite_diff, fit_power_law, laguerre_asymptotic,
                          pi_table, stationary_phase_edge, wkb_validate)
from .errors import *  # noqa: F401,F403
from .errors import CTQWError, InputError, NotQDGraph, NumericalError
from .families import (FamilyKind, FamilySpec, closed_form_measure, family_graph, family_jacobi,
                       parse_family, product_jacobi_classA, product_jacobi_classB)
from .graph_core import (Graph, JacobiSeq, Stratification, apply_adjacency, build_graph,
                         extract_jacobi, load_graph, save_graph, stratify)
from .moments import MomentReport, closed_moments, fit_exponent, moment_report, moments_from_series, sigma
from .oracle import DenseEvolution, dense_evolve, stratum_project
from .spectral import (ContinuousMeasure, DiscreteMeasure, gauss_weights, jacobi_moments,
                       jacobi_to_quadrature, stieltjes_cf, stieltjes_inversion)

__version__ = "0.1.0"
