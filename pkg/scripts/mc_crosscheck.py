"""Monte Carlo check of the analytic ARL on a small grid of scenarios.

Prints, per scenario, the empirical ARL with its standard error, the analytic
value and the standardized difference.
"""
import argparse
import itertools

import numpy as np

from rzchart.chart import ShiftSpec, arl, design_from_cv
from rzchart.simulate import SimConfig, empirical_run_length, shifted_model
from rzchart.var1 import Var1Model


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--gamma", type=float, nargs="+", default=[0.01, 0.2])
    parser.add_argument("--phi", type=float, nargs="+", default=[0.0, 0.1, 0.7])
    parser.add_argument("--tau", type=float, nargs="+", default=[1.0, 0.99])
    parser.add_argument("--rho", type=float, default=-0.8)
    parser.add_argument("--n", type=int, default=5)
    parser.add_argument("--alpha", type=float, default=0.005)
    parser.add_argument("--replications", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    print("gamma,phi,tau,empirical,stderr,analytic,z")
    for k, (g, phi, tau) in enumerate(itertools.product(args.gamma, args.phi, args.tau)):
        d = design_from_cv(g, g, args.rho, np.diag([phi, phi]), args.n, alpha=args.alpha)
        shift = ShiftSpec(tau, args.rho)
        model = shifted_model(Var1Model.from_cv(g, g, args.rho, np.diag([phi, phi])), shift)
        rep = empirical_run_length(d, SimConfig(model, args.n, args.seed + k, args.replications), workers=args.workers)
        analytic = arl(d, shift).arl
        print(f"{g},{phi},{tau},{rep.arl:.3f},{rep.stderr:.3f},{analytic:.3f},{(rep.arl - analytic) / rep.stderr:+.2f}")


if __name__ == "__main__":
    main()
