"""Certify the heat-rod system (lambda_k = -k^2) for a few b_k decay rates.

Prints the verdict, observed ratio against its analytic limit, and the
global bound as N grows.
"""

import argparse
from dataclasses import dataclass

from delayadm.admissibility import heat_preset, ratio_limit_estimate, system_check
from delayadm.model import Geometric


@dataclass
class Config:
    gamma: float = 0.1
    tau: float = 1.0
    rhos: tuple = (0.3, 0.5, 0.8, 0.97)
    Ns: tuple = (20, 40, 80)
    K: int = 10
    q_cap: float = 0.95


def run(cfg: Config):
    print(f"{'rho':>5} {'N':>4} {'verdict':>22} {'ratio':>9} {'limit':>9} {'partial':>12} {'global_bound':>12}")
    for rho in cfg.rhos:
        system = heat_preset(cfg.gamma, Geometric(rho), cfg.tau, max(cfg.Ns))
        for N in cfg.Ns:
            rep = system_check(system, N, cfg.K, cfg.q_cap)
            est = ratio_limit_estimate(system, cfg.K, N)
            gb = "-" if rep.global_bound is None else f"{rep.global_bound:.6g}"
            print(f"{rho:5.2f} {N:4d} {rep.verdict_label:>22} {rep.empirical_ratio:9.5f} "
                  f"{est.analytic:9.5f} {rep.partial_sum:12.6g} {gb:>12}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=0.1)
    ap.add_argument("--tau", type=float, default=1.0)
    args = ap.parse_args()
    run(Config(gamma=args.gamma, tau=args.tau))
