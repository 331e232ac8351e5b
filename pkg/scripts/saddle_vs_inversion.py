"""Saddle-point log density of Y_t against tilted Fourier inversion.

Default law: Gaussian part sigma2 plus normalized stable-3/2 negative jumps,
Psi(u) = sigma2 u^2 / 2 + (2/3) u^(3/2). Prints the relative error per saddle
parameter y and the ratio of the measured non-Gaussian excess to
(x^1.5 / (sigma^3 t)) (1 + sqrt(t)/3).
"""
import argparse
import math

from stieltjes import levy


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sigma2", type=float, default=1.0)
    ap.add_argument("--alpha", type=float, default=1.5)
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--y", type=float, nargs="+", default=[1, 4, 16, 64, 256, 1024])
    ap.add_argument("--no-inversion", action="store_true", help="skip the (slower) inversion column")
    args = ap.parse_args()
    trip, t, sig = levy.normalized_stable_triplet(args.sigma2, args.alpha), args.t, math.sqrt(args.sigma2)
    print(f"{'y':>7s} {'x':>10s} {'log saddle':>14s} {'log inversion':>14s} {'rel err':>10s} {'excess ratio':>12s}")
    for y in args.y:
        x, _, lv = levy.saddle_density_asymptote(trip, t, y)
        excess = -lv - x * x / (2 * args.sigma2 * t) - 0.5 * math.log(2 * math.pi * args.sigma2 * t)
        ratio = excess / (x ** 1.5 / (sig ** 3 * t) * (1 + math.sqrt(t) / 3))
        if args.no_inversion:
            inv, rel = float("nan"), float("nan")
        else:
            inv = float(levy.inverted_log_density(trip, t, [x], tilt=y)[0])
            rel = math.expm1(lv - inv)
        print(f"{y:7g} {x:10.4g} {lv:14.6f} {inv:14.6f} {rel:10.2e} {ratio:12.4f}")


if __name__ == "__main__":
    main()
