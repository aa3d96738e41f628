"""Write boundary polylines of the stability regions for tau=1, a in {-1.5, 0, 0.25}.

One CSV per curve (columns u, v) plus a residual summary on stdout.
"""

import argparse
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from delayadm.region import RegionParams, boundary, boundary_residual, eta_pi


@dataclass
class Config:
    tau: float = 1.0
    a_values: tuple = (-1.5, 0.0, 0.25)
    n_points: int = 256
    out_dir: Path = field(default_factory=lambda: Path("out/regions"))


def run(cfg: Config):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for a in cfg.a_values:
        rp = RegionParams(cfg.tau, a)
        bd = boundary(rp, cfg.n_points)
        path = cfg.out_dir / f"boundary_tau{cfg.tau:g}_a{a:g}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "v"])
            w.writerows((format(p.real, ".17g"), format(p.imag, ".17g")) for p in bd.points)
        res = float(np.max(np.abs(boundary_residual(rp, bd.points))))
        print(f"a={a:+g}: {len(bd)} points, |eta_pi|={eta_pi(rp):.12f}, max residual {res:.2e} -> {path}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--out-dir", type=Path, default=Path("out/regions"))
    args = ap.parse_args()
    run(Config(tau=args.tau, n_points=args.n, out_dir=args.out_dir))
