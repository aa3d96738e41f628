"""The cost integral

    J = (1/2pi) * int_R dw / |i w - lam - gamma exp(-i w tau)|^2,

is evaluated by branch closed forms. Two independent routes check them:
residue assembly at the roots of ``(s + conj(lam))(s - lam) + |gamma|^2``
and adaptive Gauss-Kronrod quadrature with a certified tail.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DenominatorNearZero, NearDegenerate, NotInRegion, NumericalFailure, ToleranceNotMet
from .model import DEFAULT_TOL, ComponentParams, ToleranceProfile, reduce_params, validate_component
from .region import RegionParams, contains


class CostBranch(enum.Enum):
    JA = "Ja"
    JE = "Je"
    JGAMMA = "Jgamma"
    J0 = "J0"


class Method(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    RESIDUE = "Residue"
    QUADRATURE = "Quadrature"


@dataclass(frozen=True)
class CostResult:
    value: float
    branch: CostBranch
    method: Method
    est_error: float = 0.0

    def to_dict(self):
        return {
            "value": self.value,
            "branch": self.branch.value,
            "method": self.method.value,
            "est_error": self.est_error,
        }


@dataclass(frozen=True)
class PolePair:
    z1: complex
    z2: complex
    double_root: bool


def classify_branch(a: float, gamma_abs: float, tol: ToleranceProfile = DEFAULT_TOL) -> CostBranch:
    """Compare ``|gamma|`` with ``|a|`` relative to ``max(|a|, 1)``."""
    gap = gamma_abs - abs(a)
    if abs(gap) <= tol.branch_tol * max(abs(a), 1.0):
        return CostBranch.JE
    return CostBranch.JA if gap < 0 else CostBranch.JGAMMA


def _require_region(p: ComponentParams, tol: ToleranceProfile):
    validate_component(p)
    a, g = reduce_params(p.lam, p.gamma, p.tau)
    verdict = contains(RegionParams(p.tau, a), g, tol)
    if not verdict.member:
        raise NotInRegion(
            f"gamma*exp(-i*Im(lam)*tau) = {g!r} is not in the stability region for "
            f"tau={p.tau!r}, a={a!r}"
        )
    return a, g


def _check_den(den, tol):
    if abs(den) < 1e3 * tol.root_tol:
        raise DenominatorNearZero(f"branch denominator {den!r} is numerically zero")


def _checked(value, branch, method, est_error=0.0):
    if not (math.isfinite(value) and value > 0):
        raise NumericalFailure(f"{method.value} evaluation produced non-positive J={value!r}")
    return CostResult(float(value), branch, method, est_error)


def j_closed(p: ComponentParams, tol: ToleranceProfile = DEFAULT_TOL) -> CostResult:
    """Closed-form J for the three branches ``|gamma| <, =, > |a|``."""
    a, g = _require_region(p, tol)
    tau = p.tau
    gabs = abs(g)
    branch = classify_branch(a, gabs, tol)
    if branch is CostBranch.JA:
        r = math.sqrt((abs(a) - gabs) * (abs(a) + gabs))
        # numerator and denominator divided through by exp(r*tau)
        e1 = math.exp(-r * tau)
        e2 = e1 * e1
        em = math.expm1(-2 * r * tau)
        num = -a * em - r * (1 + e2)
        den = 2 * g.real * e1 + a * (1 + e2) + r * em
        _check_den(den, tol)
        value = num / (2 * r * den)
    elif branch is CostBranch.JE:
        den = g.real + a
        _check_den(den, tol)
        value = 0.5 * (a * tau - 1) / den
    else:
        w = math.sqrt((gabs - abs(a)) * (gabs + abs(a)))
        sn, cs = math.sin(w * tau), math.cos(w * tau)
        den = g.real + a * cs + w * sn
        _check_den(den, tol)
        value = (a * sn - w * cs) / (2 * w * den)
    return _checked(value, branch, Method.CLOSED_FORM)


def j_zero(gamma: complex, tau: float, tol: ToleranceProfile = DEFAULT_TOL) -> CostResult:
    """J for ``lam = 0``: ``-cos(|g| tau) / (2 (Re g + |g| sin(|g| tau)))``."""
    p = ComponentParams(0.0, gamma, 0.0, tau)
    _require_region(p, tol)
    g = p.gamma
    gabs = abs(g)
    den = g.real + gabs * math.sin(gabs * tau)
    _check_den(den, tol)
    return _checked(-math.cos(gabs * tau) / (2 * den), CostBranch.J0, Method.CLOSED_FORM)


def poles(p: ComponentParams, tol: ToleranceProfile = DEFAULT_TOL) -> PolePair:
    """Roots of ``(s + conj(lam))(s - lam) + |gamma|^2``, ordered as ``z1, z2``.

    ``|gamma| < |a|``: ``z1,2 = -/+ sqrt(a^2 - |gamma|^2) + i b``;
    ``|gamma| > |a|``: ``z1,2 = +/- i sqrt(|gamma|^2 - a^2) + i b``.
    """
    a, b = p.a, p.beta
    gabs = abs(p.gamma)
    branch = classify_branch(a, gabs, tol)
    if branch is CostBranch.JE:
        z0 = complex(0.0, b)
        return PolePair(z0, z0, True)
    if branch is CostBranch.JA:
        r = math.sqrt((abs(a) - gabs) * (abs(a) + gabs))
        return PolePair(complex(-r, b), complex(r, b), False)
    w = math.sqrt((gabs - abs(a)) * (gabs + abs(a)))
    return PolePair(complex(0.0, b + w), complex(0.0, b - w), False)


def _weighted_e1(w: complex, z: complex, p: ComponentParams) -> complex:
    """``w / (z - lam - gamma exp(-z tau))``, overflow-safe for Re z < 0.

    With ``gamma = 0`` the pole ``z1`` coincides with ``lam`` and the
    weight ``lam - z1`` vanishes; the product's limit is 0.
    """
    if w == 0:
        return 0j
    if z.real < 0:
        ez = cmath.exp(z * p.tau)
        return w * ez / ((z - p.lam) * ez - p.gamma)
    return w / (z - p.lam - p.gamma * cmath.exp(-z * p.tau))


def j_residue(p: ComponentParams, tol: ToleranceProfile = DEFAULT_TOL) -> CostResult:
    """J from the residues at ``z1, z2``:

        J = ((lam - z1) E1(z1) + (z2 - lam) E1(z2)) / (z2 - z1),

    with ``E1(s) = 1/(s - lam - gamma exp(-s tau))``. At a double root the
    second-order residue value ``(a tau - 1) / (2 (Re g + a))`` is used.
    """
    a, g = _require_region(p, tol)
    pp = poles(p, tol)
    branch = classify_branch(a, abs(g), tol)
    if pp.double_root:
        den = g.real + a
        _check_den(den, tol)
        return _checked(0.5 * (a * p.tau - 1) / den, branch, Method.RESIDUE)
    gap = pp.z2 - pp.z1
    if abs(gap) <= 1e3 * tol.root_tol:
        raise NearDegenerate("|gamma| is close to |a| but outside the double-root tolerance")
    lam = p.lam
    total = (_weighted_e1(lam - pp.z1, pp.z1, p) + _weighted_e1(pp.z2 - lam, pp.z2, p)) / gap
    if abs(total.imag) > 1e-8 * (1 + abs(total.real)):
        raise NumericalFailure(f"residue sum has a spurious imaginary part: {total!r}")
    return _checked(total.real, branch, Method.RESIDUE)


# ---------------------------------------------------------------------------
# quadrature

# 7-point Gauss / 15-point Kronrod nodes on [-1, 1] (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes
_GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = f(x)
    k = half * (fx @ _KRONROD_W)
    g = half * (fx @ _GAUSS_W)
    return k, np.abs(k - g)


def adaptive_gk15(f, lo: float, hi: float, tol: float, h0: float, max_panels: int = 4_000_000):
    """Integrate ``f`` over ``[lo, hi]`` until the summed |K - G| error is below ``tol``.

    ``f`` must accept a 2-D array of nodes. Panels start with width at most
    ``h0`` and offending panels are bisected level by level, so the
    summation order is deterministic.
    """
    n0 = max(1, int(math.ceil((hi - lo) / h0)))
    edges = np.linspace(lo, hi, n0 + 1)
    done_val = []
    done_err = []
    a, b = edges[:-1], edges[1:]
    while True:
        val, err = _gk15(f, a, b)
        total_err = float(np.sum(err)) + sum(float(np.sum(e)) for e in done_err)
        if total_err <= tol:
            done_val.append(val)
            done_err.append(err)
            break
        if a.size + sum(v.size for v in done_val) > max_panels:
            raise ToleranceNotMet(f"quadrature error {total_err:.3e} above {tol:.3e} at panel limit")
        n_total = a.size + sum(v.size for v in done_val)
        split = err > tol / (2 * n_total)
        if not split.any():
            split = err >= np.max(err)
        done_val.append(val[~split])
        done_err.append(err[~split])
        m = 0.5 * (a[split] + b[split])
        a, b = np.concatenate([a[split], m]), np.concatenate([m, b[split]])
    value = float(np.sum(np.concatenate(done_val)))
    error = float(np.sum(np.concatenate(done_err)))
    return value, error


def quadrature_cutoff(p: ComponentParams, tol: float) -> tuple[float, float]:
    """Half-width ``W`` of the integration window centred at ``Im lam`` and its tail bound.

    Past the window the integrand is ``1/w^2`` plus a remainder bounded,
    per tail, by ``(4|gamma|/tau + 37 c^2/3) / W^3`` with
    ``c = |Re lam| + |gamma|`` (valid for ``W >= 2c``). The leading part
    integrates to ``2/W`` exactly and is added back.
    """
    c = abs(p.a) + abs(p.gamma)
    k = 4 * abs(p.gamma) / p.tau + 37 * c * c / 3
    w_tail = (2 * k / (math.pi * tol)) ** (1 / 3)
    W = max(2 * c + 1.0, w_tail)
    bound = 2 * k / W**3 / (2 * math.pi)
    return W, bound


def j_quadrature(p: ComponentParams, tol: float = DEFAULT_TOL.quad_tol,
                 tolerances: ToleranceProfile = DEFAULT_TOL) -> CostResult:
    """J by direct numerical integration of the defining integral."""
    a, g = _require_region(p, tolerances)
    W, tail_err = quadrature_cutoff(p, tol)
    lam, gam, tau, b = p.lam, p.gamma, p.tau, p.beta

    def integrand(w):
        d = 1j * w - lam - gam * np.exp(-1j * w * tau)
        return 1.0 / (d.real**2 + d.imag**2)

    h0 = min(math.pi / (2 * tau), 0.5)
    # the panel error budget is in integral units, J carries a 1/(2 pi)
    core, core_err = adaptive_gk15(integrand, b - W, b + W, math.pi * tol, h0)
    value = (core + 2.0 / W) / (2 * math.pi)
    est = core_err / (2 * math.pi) + tail_err
    if est > tol:
        raise ToleranceNotMet(f"estimated error {est:.3e} exceeds {tol:.3e}")
    return _checked(value, classify_branch(a, abs(g), tolerances), Method.QUADRATURE, est)


def j_all(p: ComponentParams, tol: ToleranceProfile = DEFAULT_TOL) -> dict:
    """All three routes, keyed by method name."""
    return {
        Method.CLOSED_FORM: j_closed(p, tol),
        Method.RESIDUE: j_residue(p, tol),
        Method.QUADRATURE: j_quadrature(p, tol.quad_tol, tol),
    }
