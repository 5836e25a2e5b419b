"""Iteration counts and backoff frequency as a function of the step size eta.

Draws seeded random models (same ranges as the acceptance suite), fits each
sample at every eta, and prints one row per eta.

    python scripts/eta_sweep.py --models 100 -n 1000 --etas 0.1 0.2 0.33 0.5 0.7 0.9
"""

import argparse

import numpy as np

from truncfit.errors import TruncFitError
from truncfit.estimator import FitConfig, compute_moments, fit
from truncfit.model import TruncatedModel
from truncfit.quadrature import Interval
from truncfit.synth import SamplerConfig, sample


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--models", type=int, default=100)
    ap.add_argument("-n", type=int, default=1000)
    ap.add_argument("--etas", type=float, nargs="+", default=[0.1, 0.2, 0.33, 0.5, 0.7, 0.9])
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    cases = []
    for _ in range(args.models):
        width, centre = rng.uniform(2, 10), rng.uniform(-1, 1)
        iv = Interval(centre - width / 2, centre + width / 2)
        m = TruncatedModel(rng.uniform(-3, 3), rng.uniform(-0.5, 3), iv)
        y = sample(m, args.n, SamplerConfig(seed=int(rng.integers(2**63))))
        cases.append((compute_moments(y), iv))

    print(f"{'eta':>6} {'converged':>10} {'backoffs':>9} {'median it':>10} {'max it':>8}")
    for eta in args.etas:
        its, backoffs, ok = [], 0, 0
        for s, iv in cases:
            try:
                r = fit(s, iv, FitConfig(eta=eta))
            except TruncFitError:
                continue
            ok += r.converged
            backoffs += r.eta_used < eta
            its.append(r.total_iterations)
        print(f"{eta:>6g} {ok:>6}/{len(cases):<3} {backoffs:>9} {np.median(its):>10.0f} {max(its):>8}")


if __name__ == "__main__":
    main()
