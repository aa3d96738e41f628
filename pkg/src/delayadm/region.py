"""Stability regions for the scalar quasi-polynomial ``s - a - eta*exp(-s*tau)``.

For fixed ``tau > 0`` and ``a <= 1/tau`` the region collects the
coefficients ``eta`` for which every root lies in the open left
half-plane. Its shape depends on the sign of ``a``:

* ``a < 0``: the open disc of radius ``|a|`` together with the points
  outside it satisfying ``Re eta + a < 0``, ``|eta| < |eta_pi|`` and
  ``|Arg eta| > tau*x + arctan(x/|a|)`` where ``x = sqrt(|eta|^2 - a^2)``;
* ``a = 0``: ``eta != 0``, ``Re eta < 0``, ``|eta| < pi/(2 tau)`` and
  ``|Arg eta| > tau*|eta| + pi/2``;
* ``0 < a <= 1/tau``: ``Re eta + a < 0``, ``|eta| < |eta_pi|`` and
  ``|Arg eta| > tau*x - arctan(x/a) + pi``.

``Arg`` is the principal argument in ``(-pi, pi]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRegion, DelayNonPositive, EigenvalueOutOfRange, InvalidArgument, NoRoot
from .model import DEFAULT_TOL, ToleranceProfile


class Branch(enum.Enum):
    NEG_A = "NegA"
    ZERO_A = "ZeroA"
    POS_A = "PosA"


@dataclass(frozen=True)
class RegionParams:
    tau: float
    a: float

    def __post_init__(self):
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "a", float(self.a))
        if not self.tau > 0:
            raise DelayNonPositive(f"tau must be positive, got {self.tau!r}")
        if not math.isfinite(self.a):
            raise InvalidArgument(f"a must be finite, got {self.a!r}")
        if self.a * self.tau > 1.0 and not math.isclose(self.a * self.tau, 1.0, abs_tol=1e-15, rel_tol=0):
            raise EigenvalueOutOfRange(f"a={self.a!r} exceeds 1/tau={1 / self.tau!r}")

    @property
    def branch(self) -> Branch:
        if self.a < 0:
            return Branch.NEG_A
        if self.a == 0:
            return Branch.ZERO_A
        return Branch.POS_A


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    branch: Branch
    via_disc: bool
    distance_hint: float
    reason: str = ""


@dataclass(frozen=True)
class RegionBoundary:
    points: np.ndarray
    closed: bool
    params: RegionParams

    def __len__(self):
        return len(self.points)

    @property
    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.points)))


def _bisect(fun, lo, hi, max_iter=200):
    """Root of an increasing function on ``[lo, hi]`` with ``fun(lo) < 0 < fun(hi)``."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fun(mid) < 0:
            lo = mid
        else:
            hi = mid
    # pick whichever endpoint has the smaller residual
    return lo if abs(fun(lo)) <= abs(fun(hi)) else hi


def eta_pi(rp: RegionParams, tol: ToleranceProfile = DEFAULT_TOL) -> float:
    """Outer radius ``|eta_pi|`` of the region.

    Solved by bisection in ``x = sqrt(r^2 - a^2)``. For ``a = 0`` the
    closed form ``pi/(2 tau)`` is returned.
    """
    tau, a = rp.tau, rp.a
    if a == 0:
        return math.pi / (2 * tau)
    if a < 0:
        # tau*x + arctan(x/|a|) increases from 0 and exceeds pi at x = pi/tau
        x = _bisect(lambda x: tau * x + math.atan(x / -a) - math.pi, 0.0, math.pi / tau)
    else:
        if a * tau >= 1.0 - 1e-15:
            raise NoRoot(
                f"a={a!r} equals 1/tau: tau*x - arctan(x/a) is positive for all x > 0, "
                "so the region is empty"
            )
        g = lambda x: tau * x - math.atan(x / a)  # noqa: E731
        x_min = math.sqrt(a / tau - a * a)
        x_hi = max(10.0 / tau, math.pi / (2 * tau) + 1.0)
        x = _bisect(g, x_min, x_hi)
        if x <= tol.root_tol:
            raise NoRoot(f"only the trivial root x=0 found for a={a!r}")
    return math.hypot(x, a)


def critical_angle(rp: RegionParams, r):
    """Angle ``theta(r)`` on the right of the ``|Arg eta| > ...`` inequality.

    Vectorised over ``r``; requires ``r >= |a|``.
    """
    tau, a = rp.tau, rp.a
    r = np.asarray(r, dtype=float)
    if a == 0:
        return tau * r + math.pi / 2
    x = np.sqrt(np.maximum((r - abs(a)) * (r + abs(a)), 0.0))
    if a < 0:
        return tau * x + np.arctan(x / -a)
    return tau * x - np.arctan(x / a) + math.pi


def _slacks(rp: RegionParams, eta, tol: ToleranceProfile):
    """Vectorised membership core: returns ``(member, via_disc, hint)``."""
    eta = np.asarray(eta, dtype=complex)
    tau, a = rp.tau, rp.a
    mod = np.abs(eta)
    arg = np.abs(np.angle(eta))
    re = eta.real
    with np.errstate(invalid="ignore"):
        if a == 0:
            s_ang = arg - (tau * mod + math.pi / 2)
            hint = np.minimum.reduce([mod, -re, math.pi / (2 * tau) - mod, s_ang])
            member = hint > tol.root_tol
            # the origin is a boundary point, so nearby outsiders are close too
            hint = np.where(hint < 0, np.maximum(hint, -mod), hint)
            return member, np.zeros_like(member), hint
        try:
            r_pi = eta_pi(rp, tol)
        except NoRoot:
            r_pi = None
        theta = critical_angle(rp, np.maximum(mod, abs(a)))
        s_ang = arg - theta
        s_re = -(re + a)
        parts = [s_re, s_ang]
        if r_pi is not None:
            parts.append(r_pi - mod)
        outer = np.minimum.reduce(parts)
        if a > 0:
            # |eta| <= a forces Re(eta) + a >= 0 so s_re already rejects these
            member = outer > tol.root_tol
            return member, np.zeros_like(member), outer
        disc = abs(a) - mod
        outer = np.where(mod >= abs(a), outer, -np.inf)
        via_disc = disc > 0
        hint = np.where(via_disc, disc, outer)
        member = via_disc | (outer > tol.root_tol)
        return member, via_disc, hint


def contains(rp: RegionParams, eta: complex, tol: ToleranceProfile = DEFAULT_TOL) -> MembershipVerdict:
    """Membership of ``eta`` in the region, with the slack of the binding inequality.

    Points on the boundary to within ``root_tol`` are reported as
    non-members.
    """
    member, via_disc, hint = _slacks(rp, complex(eta), tol)
    member, via_disc, hint = bool(member), bool(via_disc), float(hint)
    if member:
        reason = "inside the disc |eta| < |a|" if via_disc else "all inequalities strict"
    elif rp.branch is Branch.ZERO_A and eta == 0:
        reason = "eta = 0 is excluded"
    else:
        reason = "an inequality fails"
    if abs(hint) <= tol.boundary_eps:
        reason += " (within boundary_eps of the boundary)"
    return MembershipVerdict(member, rp.branch, via_disc, hint, reason)


def contains_many(rp: RegionParams, etas, tol: ToleranceProfile = DEFAULT_TOL):
    """Vectorised :func:`contains`; returns ``(member, distance_hint)`` arrays."""
    member, _, hint = _slacks(rp, etas, tol)
    return np.asarray(member, dtype=bool), np.asarray(hint, dtype=float)


def boundary_residual(rp: RegionParams, eta):
    """``|Arg eta| - theta(|eta|)``: zero on the angular part of the boundary."""
    eta = np.asarray(eta, dtype=complex)
    mod = np.abs(eta)
    return np.abs(np.angle(eta)) - critical_angle(rp, np.maximum(mod, abs(rp.a)))


def boundary(rp: RegionParams, n_points: int = 256, tol: ToleranceProfile = DEFAULT_TOL) -> RegionBoundary:
    """Sample the outer boundary as a closed, conjugate-symmetric polyline.

    ``n_points`` radii are taken uniformly between the inner limit
    (``|a|`` for ``a < 0``, ``0+`` for ``a = 0``, ``a`` for ``a > 0``) and the
    outer radius. The upper arc is emitted with increasing radius and the
    lower arc back again, so the result has roughly ``2 * n_points``
    vertices. For ``a < 0`` the angular curve touches the disc only at
    ``eta = |a|``, which is where it closes.
    """
    if isinstance(n_points, bool) or not isinstance(n_points, (int, np.integer)) or n_points < 16:
        raise InvalidArgument(f"n_points must be an integer >= 16, got {n_points!r}")
    tau, a = rp.tau, rp.a
    try:
        r_out = eta_pi(rp, tol)
    except NoRoot as exc:
        raise DegenerateRegion(str(exc)) from None

    if a == 0:
        r = np.linspace(0.0, r_out, n_points + 1)[1:]
    else:
        r = np.linspace(abs(a), r_out, n_points)
    theta = critical_angle(rp, r)
    if a == 0:
        theta[-1] = math.pi  # exact closed form at the outer radius
    if not np.any(theta < math.pi):
        raise DegenerateRegion("angular condition infeasible at every sampled radius")

    upper = r * np.exp(1j * theta)
    # snap the vertices that lie on the real axis
    on_axis_pi = np.isclose(theta, math.pi, rtol=0, atol=0)
    upper[on_axis_pi] = -r[on_axis_pi] + 0j
    on_axis_0 = theta == 0
    upper[on_axis_0] = r[on_axis_0] + 0j
    lower = np.conj(upper[::-1])
    # drop duplicated real-axis vertices where the arcs meet
    if lower.size and upper[-1].imag == 0:
        lower = lower[1:]
    if lower.size and upper[0].imag == 0:
        lower = lower[:-1]
    points = np.concatenate([upper, lower])
    return RegionBoundary(points, True, rp)
