"""Samplers shared by the unit and acceptance tests."""

import math

import numpy as np

from delayadm.model import DEFAULT_TOL, ComponentParams
from delayadm.region import RegionParams, contains_many


def sample_admissible(rng: np.random.Generator, n: int, tau_range=(0.1, 5.0), tol=DEFAULT_TOL):
    """Rejection-sample ``n`` components with the rotated gamma strictly inside the region.

    Points within ``boundary_eps`` of the boundary and near-equal ``|gamma|``,
    ``|a|`` pairs are rejected.
    """
    out = []
    while len(out) < n:
        tau = float(rng.uniform(*tau_range))
        a = float(rng.uniform(-4.0, 1.0 / tau))
        beta = float(rng.uniform(-3.0, 3.0))
        radius = 1.2 * max(abs(a), math.pi / tau)
        phi = rng.uniform(-math.pi, math.pi)
        g_rot = radius * math.sqrt(rng.uniform()) * complex(math.cos(phi), math.sin(phi))
        member, hint = contains_many(RegionParams(tau, a), np.array([g_rot]), tol)
        if not member[0] or hint[0] <= tol.boundary_eps:
            continue
        if abs(abs(g_rot) - abs(a)) <= 10 * tol.branch_tol * max(abs(a), 1.0):
            continue
        gamma = g_rot * complex(math.cos(beta * tau), math.sin(beta * tau))
        out.append(ComponentParams(complex(a, beta), gamma, 1.0, tau))
    return out


# certified components for the bound checks; each is asserted to be a member where used
BOUND_COMPONENTS = [
    ComponentParams(-1.0, 0.3, 1.0, 1.0),
    ComponentParams(-1.0, -1.0, 1.0, 1.0),
    ComponentParams(0.0, -1.0, 1.0, 1.0),
    ComponentParams(-0.5 + 1.0j, 0.4, 2.0, 1.0),
    ComponentParams(0.25, -1.2, 1.0, 1.0),
    ComponentParams(-2.0, 1.5j, 0.5j, 1.0),
    ComponentParams(-3.0, -2.5, 1.0, 0.5),
    ComponentParams(-0.2, -1.0, 1.0 - 1.0j, 1.0),
    ComponentParams(0.1, -0.8, 1.0, 1.5),
    ComponentParams(-5.0, 4.9, 1.0, 0.3),
]


# filled by the acceptance tests, printed by conftest at the end of the run
ACCEPTANCE_LINES = []


def record(label: str, ok: bool, detail: str) -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line
