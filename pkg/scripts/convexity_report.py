#!/usr/bin/env python3
"""Emit the dimensionless convexity diagnostics for the reference cases.

For eps_p = +/-0.01 under M = 20 N dm: tables of (hbar, f, f'', f**) and an
SVG overlaying f with its convex envelope.  For kappa_p = +/-0.05: tables of
(hbar, g, g'') and the minimum of g'' on the grid (always positive).
"""

import argparse
import os
import sys

import numpy as np

import growbeam as gb
from growbeam.output import _fmt, _write_atomic, render_curve_svg

M, E, H0 = 20.0, 1.0e5, 0.3


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output-dir", default="out/convexity")
    parser.add_argument("--samples", type=int, default=2048)
    parser.add_argument("--hbar-max", type=float, default=6.0)
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)
    os.makedirs(args.output_dir, exist_ok=True)
    hbar = np.linspace(1.0, args.hbar_max, args.samples)

    for eps in (0.01, -0.01):
        eta = M / (E * H0**2 * eps)
        f = gb.f_value(eta, hbar)
        f2 = gb.f_second(eta, hbar)
        _, env = gb.convex_envelope_1d(hbar, f)
        tag = "plus" if eps > 0 else "minus"
        rows = ["hbar,f,f_second,f_envelope"]
        rows += [f"{_fmt(x)},{_fmt(a)},{_fmt(b)},{_fmt(c)}"
                 for x, a, b, c in zip(hbar, f, f2, env)]
        _write_atomic(os.path.join(args.output_dir, f"f_eps_{tag}.csv"),
                      "\n".join(rows) + "\n")
        render_curve_svg(hbar, {"f": f, "f**": env},
                         os.path.join(args.output_dir, f"f_eps_{tag}.svg"),
                         "hbar", "f")
        if not args.quiet:
            gap = float(np.max(f - env))
            print(f"eps_p={eps:+.2f}: eta={eta:+.4f}  min f''={float(np.min(f2)):+.4f}"
                  f"  max (f - f**)={gap:.4f}")

    for kap in (0.05, -0.05):
        mu = M / (E * H0**3 * kap)
        g = gb.g_value(mu, hbar)
        g2 = gb.g_second(mu, hbar)
        tag = "plus" if kap > 0 else "minus"
        rows = ["hbar,g,g_second"]
        rows += [f"{_fmt(x)},{_fmt(a)},{_fmt(b)}" for x, a, b in zip(hbar, g, g2)]
        _write_atomic(os.path.join(args.output_dir, f"g_kappa_{tag}.csv"),
                      "\n".join(rows) + "\n")
        render_curve_svg(hbar, {"g": g},
                         os.path.join(args.output_dir, f"g_kappa_{tag}.svg"),
                         "hbar", "g")
        if not args.quiet:
            print(f"kappa_p={kap:+.2f}: mu={mu:+.4f}  min g''={float(np.min(g2)):+.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
