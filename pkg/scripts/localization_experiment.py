#!/usr/bin/env python3
"""Localization fixed points: solve the smallest radius with
Pi_n(local class) <= sqrt(n) * delta^2 across an n-grid and compare the
fitted power law with the closed-form exponents (VC and adaptation cases)."""

import argparse

from mixrate.classes import EntropyModel
from mixrate.empirical import slope_fit
from mixrate.rates import pi_n, solve_delta_n


def vc_pi(delta, n, gamma, D):
    s = min(delta, 1.0)
    ent = EntropyModel(D=D, V=0.0, B=10.0, alpha=0.0, r=2.0, sigma=s, b=1.0)
    return pi_n(ent, gamma, s, n, enforce_scale=False)


def adapt_pi(delta, n, gamma, alpha):
    s = min(delta, 1.0)
    ent = EntropyModel(alpha=alpha, theta=s, V=0.0, B=10.0, r=2.0, sigma=s, b=1.0)
    return pi_n(ent, gamma, s, n, enforce_scale=False)


def run(gamma, D, alpha, n_min_log2, n_max_log2):
    for name, fn, target in [
            ("vc", lambda d, n: vc_pi(d, n, gamma, D), gamma / (gamma + 1)),
            ("adaptation", lambda d, n: adapt_pi(d, n, 2.0, alpha), 2.0 / alpha)]:
        pairs = []
        for k in range(n_min_log2, n_max_log2 + 1, 2):
            n = 2 ** k
            dn = solve_delta_n(lambda d: fn(d, n), n, t=1.5, delta_max=4.0)
            pairs.append((n, dn * dn))
        fit = slope_fit(pairs)
        print(f"{name}: delta_n^2 exponent {-fit.slope:.4f} "
              f"(closed form {target:.4f})")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--vc-dim", type=float, default=3.0)
    ap.add_argument("--alpha", type=float, default=10.0)
    ap.add_argument("--n-min-log2", type=int, default=10)
    ap.add_argument("--n-max-log2", type=int, default=20)
    args = ap.parse_args()
    run(args.gamma, args.vc_dim, args.alpha, args.n_min_log2, args.n_max_log2)
