#!/usr/bin/env python3
"""Spreading exponents nu for the Hermite, line and Laguerre classes.

sigma(t) comes from truncated ODE amplitudes (Hermite, line) or from the
closed moments (Laguerre, whose strata spread as t^2 and need a long window).
"""

from __future__ import annotations

import argparse

import numpy as np

from ctqw import (amplitude_ode, closed_moments, family_jacobi, fit_exponent, moments_from_series,
                  parse_family, sigma)


def ode_nu(text: str, K: int, t: np.ndarray, line: bool = False) -> tuple[float, float]:
    s = amplitude_ode(family_jacobi(parse_family(text)), K, t)
    return fit_exponent(t, sigma(moments_from_series(s, 1, line), moments_from_series(s, 2, line)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=40)
    args = ap.parse_args()

    lag = parse_family("laguerre:a=1,gamma=0")
    tg = np.geomspace(10, 1000, args.points)
    rows = [
        ("hermite", *ode_nu("hermite", 400, np.geomspace(0.5, 10, args.points)), 1.0),
        ("line", *ode_nu("line", 200, np.geomspace(1, 50, args.points), line=True), 1.0),
        ("laguerre", *fit_exponent(tg, sigma(closed_moments(lag, 1, tg), closed_moments(lag, 2, tg))), 2.0),
    ]
    print("family,nu,stderr,expected")
    for name, nu, err, want in rows:
        print(f"{name},{nu:.5f},{err:.2e},{want:.1f}")


if __name__ == "__main__":
    main()
