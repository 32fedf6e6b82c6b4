#!/usr/bin/env python3
"""Maximum of pi(n, t) over a time window, for a range of quadrature sizes.

Prints a CSV table n,max_pi and the smallest n whose maximum falls below
``--threshold``.
"""

from __future__ import annotations

import argparse

import numpy as np

from ctqw import pi_table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-min", type=int, default=300)
    ap.add_argument("--n-max", type=int, default=700)
    ap.add_argument("--n-step", type=int, default=10)
    ap.add_argument("--t-max", type=float, default=1000.0)
    ap.add_argument("--dt", type=float, default=0.05)
    ap.add_argument("--threshold", type=float, default=1e-3)
    args = ap.parse_args()

    ns = np.arange(args.n_min, args.n_max + 1, args.n_step)
    t = np.arange(0.0, args.t_max + args.dt / 2, args.dt)
    table = pi_table(ns, t)
    print("n,max_pi")
    for n, v in zip(ns, table):
        print(f"{n},{v:.6e}")
    below = ns[table < args.threshold]
    first = int(below[0]) if below.size else None
    print(f"# smallest n with max_pi < {args.threshold:g}: {first}")


if __name__ == "__main__":
    main()
