"""Growth of the state norm for the uncertified component lambda=0, gamma=-1.6, tau=1.

Compares the simulated growth of the extended-state norm with the rate
predicted by the rightmost characteristic root (principal Lambert W branch).
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from delayadm.charfun import CharacteristicFn, refine_root
from delayadm.ddesim import Indicator, extended_norm_series, simulate_component
from delayadm.model import ComponentParams


@dataclass
class Config:
    lam: float = 0.0
    gamma: float = -1.6
    tau: float = 1.0
    t_end: float = 400.0
    m: int = 64


def run(cfg: Config):
    p = ComponentParams(cfg.lam, cfg.gamma, 1.0, cfg.tau)
    # seed near the marginal pair of the gamma*tau = -pi/2 case
    root = refine_root(CharacteristicFn(p), complex(0.0, math.pi / (2 * cfg.tau)))
    tr = simulate_component(p, Indicator(0.0, 1.0), None, cfg.t_end, cfg.m)
    norms = extended_norm_series(tr.full, tr.m, tr.dt)
    print(f"rightmost root {root.real:.9f} {root.imag:+.6f}i; predicted squared-norm rate {2 * root.real:.6f}")
    for t0, t1 in ((10, 40), (10, 100), (10, 400)):
        i0, i1 = int(round(t0 / tr.dt)), int(round(t1 / tr.dt))
        print(f"norm(t={t1})/norm(t={t0}) = {norms[i1] / norms[i0]:10.4f}   "
              f"exp(2 Re s ({t1 - t0})) = {math.exp(2 * root.real * (t1 - t0)):10.4f}")
    needed = math.log(1e3) / (2 * root.real)
    print(f"a 1e3-fold growth needs about {needed:.0f} time units at this rate")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=-1.6)
    ap.add_argument("--t-end", type=float, default=400.0)
    args = ap.parse_args()
    run(Config(gamma=args.gamma, t_end=args.t_end))
