"""Ricci residual against grid resolution for the spinor families.

Prints one row per (family, res) with the normalized residual and the
observed order log2(r_coarse / r_fine). Fourth-order stencils should show
orders near 4 once the grid resolves the metric.

    python3 scripts/convergence_study.py --res 64 128 256 --order 4
"""
import argparse

import numpy as np

from ricci_surfaces.analytic import Chart
from ricci_surfaces.conformal import ricci_residual
from ricci_surfaces.conical import conical_spinor_pair
from ricci_surfaces.gallery import defaults
from ricci_surfaces.spinor import metric_from_spinor


def families():
    d = defaults()["charts"]
    for n in (1, 2, 4):
        yield f"zn-family({n})", conical_spinor_pair(n, "spherical"), d["zn-family"]
    for n in (1, 2):
        yield f"lorentz-family({n})", conical_spinor_pair(n, "hyperbolic"), d["lorentz-family"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--res", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--order", type=int, choices=(2, 4), default=4)
    args = ap.parse_args()

    print(f"{'family':<20}{'res':>6}{'residual':>14}{'order':>8}")
    for name, pair, rect in families():
        prev = None
        for res in args.res:
            r = ricci_residual(metric_from_spinor(pair, Chart(tuple(rect), res)), args.order).normalized_residual
            rate = f"{np.log2(prev / r):8.2f}" if prev else f"{'':>8}"
            print(f"{name:<20}{res:>6}{r:>14.3e}{rate}")
            prev = r


if __name__ == "__main__":
    main()
