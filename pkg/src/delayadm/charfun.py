"""Characteristic function ``s - lam - gamma*exp(-s*tau)`` and a root counter.

The counter is the independent stability oracle for the region module:
it winds around the rectangle ``[0, R] x [-R, R]`` with
``R = |lam| + |gamma| + 1``. Any root with ``Re s >= 0`` satisfies
``|s| <= |lam| + |gamma|`` because ``|exp(-s*tau)| <= 1`` there, so the
rectangle holds every closed right half-plane root.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContourTooClose, NoConvergence
from .model import DEFAULT_TOL, ComponentParams, ToleranceProfile


@dataclass(frozen=True)
class CharacteristicFn:
    params: ComponentParams

    @classmethod
    def from_values(cls, lam, gamma, tau):
        return cls(ComponentParams(lam, gamma, 0.0, tau))

    def __call__(self, s):
        p = self.params
        if np.isscalar(s):
            s = complex(s)
            return s - p.lam - p.gamma * cmath.exp(-s * p.tau)
        s = np.asarray(s, dtype=complex)
        return s - p.lam - p.gamma * np.exp(-s * p.tau)

    def derivative(self, s):
        p = self.params
        if np.isscalar(s):
            return 1 + p.tau * p.gamma * cmath.exp(-complex(s) * p.tau)
        s = np.asarray(s, dtype=complex)
        return 1 + p.tau * p.gamma * np.exp(-s * p.tau)


@dataclass(frozen=True)
class RootCount:
    count: int
    contour: tuple  # (re_min, re_max, im_min, im_max)
    min_modulus_on_contour: float
    samples: int


def eval(f: CharacteristicFn, s):  # noqa: A001 - mirrors the operation name
    return f(s)


def _rectangle_path(R):
    corners = np.array([-1j * R, R - 1j * R, R + 1j * R, 1j * R, -1j * R])

    def path(t):
        # t in [0, 4): edge index = floor(t)
        t = np.asarray(t, dtype=float)
        edge = np.minimum(np.floor(t).astype(int), 3)
        frac = t - edge
        return corners[edge] + frac * (corners[edge + 1] - corners[edge])

    return path


def _too_close(values, floor):
    min_mod = float(np.min(np.abs(values)))
    if min_mod < floor:
        raise ContourTooClose(
            f"|f| = {min_mod:.3e} on the contour; a root lies on or near the imaginary axis"
        )


def _winding(f, path, t, max_step, floor):
    """Refine ``t`` until every phase increment is below ``max_step``."""
    values = f(path(t))
    for _ in range(60):
        _too_close(values, floor)
        dphi = np.angle(values[1:] / values[:-1])
        bad = np.abs(dphi) >= max_step
        if not bad.any():
            return t, values, float(np.sum(dphi))
        mids = 0.5 * (t[:-1][bad] + t[1:][bad])
        order_t = np.concatenate([t, mids])
        order = np.argsort(order_t, kind="stable")
        t = order_t[order]
        values = np.concatenate([values, f(path(mids))])[order]
    raise NoConvergence("phase tracking did not resolve the contour")


def count_unstable_roots(
    f: CharacteristicFn, tol: ToleranceProfile = DEFAULT_TOL, scale: float = 1.0
) -> RootCount:
    """Count zeros in the closed right half-plane by the argument principle.

    ``scale`` enlarges the a-priori contour (``scale=2`` doubles ``R``);
    the count must not depend on it.
    """
    p = f.params
    R = scale * (abs(p.lam) + abs(p.gamma) + 1.0)
    path = _rectangle_path(R)
    # left edge oscillates with period 2*pi/tau in Im s
    per_edge = 64 + int(16 * R * (1.0 + p.tau))
    t = np.linspace(0.0, 4.0, 4 * per_edge + 1)

    previous = None
    for _ in range(12):
        t, values, total = _winding(f, path, t, math.pi / 2, 10 * tol.root_tol)
        winding = int(round(total / (2 * math.pi)))
        min_mod = float(np.min(np.abs(values)))
        if previous is not None and winding == previous:
            return RootCount(winding, (0.0, R, -R, R), min_mod, len(t))
        previous = winding
        # global doubling as the stability check for the winding number
        t = np.sort(np.concatenate([t, 0.5 * (t[:-1] + t[1:])]))
    raise NoConvergence("winding number did not stabilise under refinement")


def refine_root(
    f: CharacteristicFn, seed: complex, tol: ToleranceProfile = DEFAULT_TOL, max_iter: int = 100
) -> complex:
    """Newton iteration from ``seed`` to ``|f(s)| < root_tol``."""
    s = complex(seed)
    for _ in range(max_iter):
        val = f(s)
        if abs(val) < tol.root_tol:
            return s
        d = f.derivative(s)
        if abs(d) < 1e-300 or not cmath.isfinite(d):
            raise NoConvergence(f"derivative vanishes at s={s!r}")
        s = s - val / d
        if not cmath.isfinite(s):
            break
    raise NoConvergence(f"Newton did not converge from seed {seed!r}")
