#!/usr/bin/env python3
"""Envelope checks of q_0(t) for the comb and star lattices.

For each lattice the amplitude is computed by quadrature and compared with
the endpoint asymptotic form derived from its spectral density.  For the
star lattice the printed coefficient with exponent 1/2 is compared as well.
"""

from __future__ import annotations

import argparse
import json
import math

import numpy as np

from ctqw import (AsymptoticForm, closed_form_measure, family_jacobi, parse_family,
                  quadrature_series, stationary_phase_edge, wkb_validate)


def check(text: str, t1: float, t2: float, dt: float) -> list[dict]:
    spec = parse_family(text)
    t = np.arange(t1 - 10, t2 + 20, dt)
    series = quadrature_series(family_jacobi(spec), 0, t)
    forms = {"derived": stationary_phase_edge(closed_form_measure(spec), spec.scale)}
    if spec.kind.value == "star":
        N = spec["N"]
        forms["printed"] = AsymptoticForm(4 * N * math.gamma(1.5) / (math.pi * (N - 2) ** 2),
                                          0.5, 2.0, 0.75 * math.pi)
    rows = []
    for name, form in forms.items():
        rep = wkb_validate(series, form, (t1, t2)).to_dict(text)
        rep["form"] = name
        rows.append(rep)
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t1", type=float, default=50.0)
    ap.add_argument("--t2", type=float, default=300.0)
    ap.add_argument("--dt", type=float, default=0.02)
    ap.add_argument("families", nargs="*", default=["comb", "star:N=3", "star:N=4", "star:N=5"])
    args = ap.parse_args()
    for text in args.families:
        for row in check(text, args.t1, args.t2, args.dt):
            print(json.dumps(row))


if __name__ == "__main__":
    main()
