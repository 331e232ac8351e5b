"""Scan t for Psi(u) = u log(u+1): Carleman verdict, fitted Fourier envelope, classification."""
import argparse

import numpy as np

from stieltjes import criteria as cr
from stieltjes import levy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=float, nargs="+", default=[1.0, 1.5, 1.9, 2.0, 2.001, 2.1, 2.5, 3.0])
    ap.add_argument("--psi", default="x*log(x+1)")
    args = ap.parse_args()
    print(f"{'t':>7s} {'carleman':>10s} {'C':>8s} {'verdict':>14s}")
    for t in args.t:
        law = levy.LogLevyLaw(t, psi=args.psi)
        carl = cr.carleman(cr.MomentSequence.from_expr(f"{t!r}*({args.psi})"))
        cb = levy.condition_b_check(law, n_grid=np.linspace(5, 100, 20))
        v = levy.classify_loglevy(law)
        print(f"{t:7.3f} {carl.verdict.value:>10s} {cb.C:8.4f} {v.outcome.value:>14s}")


if __name__ == "__main__":
    main()
