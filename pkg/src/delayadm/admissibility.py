"""Admissibility certificates for single components and truncated diagonal systems.

A component with ``gamma exp(-i Im(lam) tau)`` inside the stability
region has an infinite-time admissible control coefficient ``b`` with

    ||Phi_inf(u)||^2 <= (1 + tau) |b|^2 J ||u||^2,

and the whole diagonal system is admissible when ``C_k = |b_k|^2 J_k`` is
summable. Summability is certified here by a ratio bound on the tail.
"""

from __future__ import annotations

import enum
import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .costint import j_closed, j_quadrature
from .errors import IndexRangeError, NotInRegion, NumericalFailure, ValidationError
from .model import (
    DEFAULT_TOL,
    ComponentParams,
    DiagonalDelaySystem,
    HEAT_LAMBDA,
    ToleranceProfile,
    as_rule,
    reduce_params,
    validate_component,
)
from .region import RegionParams, contains


@dataclass(frozen=True)
class ComponentCertificate:
    k: int
    lam: complex
    gamma: complex
    b: complex
    tau: float
    member: bool
    J: Optional[float] = None
    C: Optional[float] = None
    bound: Optional[float] = None
    boundary_hypothesis: bool = False

    def to_dict(self):
        return {
            "k": self.k,
            "lambda": [self.lam.real, self.lam.imag],
            "gamma": [self.gamma.real, self.gamma.imag],
            "b": [self.b.real, self.b.imag],
            "member": self.member,
            "J_k": self.J,
            "C_k": self.C,
            "bound": self.bound,
            "boundary_hypothesis": self.boundary_hypothesis,
        }


class Verdict(enum.Enum):
    CERTIFIED = "CertifiedAdmissible"
    INCONCLUSIVE = "Inconclusive"
    VIOLATED = "HypothesisViolated"


@dataclass
class SystemReport:
    N: int
    K: int
    tau: float
    partial_sum: float
    verdict: Verdict
    tail_bound: Optional[float] = None
    empirical_ratio: Optional[float] = None
    global_bound: Optional[float] = None
    violated_k: Optional[int] = None
    q_cap: float = 0.95
    certificates: list = field(default_factory=list)
    paranoid_checked: list = field(default_factory=list)

    @property
    def verdict_label(self) -> str:
        if self.verdict is Verdict.VIOLATED:
            return f"HypothesisViolated({self.violated_k})"
        return self.verdict.value

    def to_dict(self, with_components=True):
        out = {
            "N": self.N,
            "K": self.K,
            "tau": self.tau,
            "q_cap": self.q_cap,
            "partial_sum": self.partial_sum,
            "tail_bound": self.tail_bound,
            "empirical_ratio": self.empirical_ratio,
            "verdict": self.verdict_label,
            "global_bound": self.global_bound,
            "paranoid_checked": self.paranoid_checked,
        }
        if with_components:
            out["components"] = [c.to_dict() for c in self.certificates]
        return out


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("RA_THREADS", "1")))
    except ValueError:
        return 1


def component_bound(p: ComponentParams, k: int = 1, tol: ToleranceProfile = DEFAULT_TOL) -> ComponentCertificate:
    """Certificate for one component; ``member=False`` when the region test fails."""
    validate_component(p)
    a, g = reduce_params(p.lam, p.gamma, p.tau)
    verdict = contains(RegionParams(p.tau, a), g, tol)
    if not verdict.member:
        return ComponentCertificate(k, p.lam, p.gamma, p.b, p.tau, False,
                                    boundary_hypothesis=p.boundary_hypothesis)
    J = j_closed(p, tol).value
    C = abs(p.b) ** 2 * J
    return ComponentCertificate(k, p.lam, p.gamma, p.b, p.tau, True, J, C, (1 + p.tau) * C,
                                p.boundary_hypothesis)


def direct_component_coeff(lambda_k: complex, b_k: complex, tau: float, k: int = 1,
                           tol: ToleranceProfile = DEFAULT_TOL) -> ComponentCertificate:
    """Coefficient for ``z' = lambda_k z(t - tau) + b_k u``.

    This is the retarded component with ``lam = 0`` and ``gamma = lambda_k``:

        C_k = |b_k|^2 (-cos(|l| tau)) / (2 (Re l + |l| sin(|l| tau))).
    """
    lk = complex(lambda_k)
    rp = RegionParams(tau, 0.0)
    if not contains(rp, lk, tol).member:
        raise NotInRegion(f"lambda_k={lk!r} is outside the a=0 region for tau={tau!r}")
    m = abs(lk)
    den = 2 * (lk.real + m * math.sin(m * tau))
    J = -math.cos(m * tau) / den
    C = abs(b_k) ** 2 * J
    return ComponentCertificate(k, 0j, lk, complex(b_k), float(tau), True, J, C, (1 + tau) * C)


def _certify(system: DiagonalDelaySystem, k: int, tol: ToleranceProfile) -> ComponentCertificate:
    p = system.component(k)
    if system.preset == "direct":
        try:
            return direct_component_coeff(p.gamma, p.b, p.tau, k, tol)
        except NotInRegion:
            return ComponentCertificate(k, p.lam, p.gamma, p.b, p.tau, False)
    return component_bound(p, k, tol)


def certificates(system: DiagonalDelaySystem, N: int, tol: ToleranceProfile = DEFAULT_TOL) -> list:
    ks = range(1, N + 1)
    threads = min(_thread_count(), N)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda k: _certify(system, k, tol), ks))
    return [_certify(system, k, tol) for k in ks]


def _ratio(c_next: float, c_prev: float) -> float:
    if c_prev > 0:
        return c_next / c_prev
    return 0.0 if c_next == 0 else math.inf


def system_check(
    system: DiagonalDelaySystem,
    N: Optional[int] = None,
    K: int = 10,
    q_cap: float = 0.95,
    paranoid: bool = False,
    seed: int = 0,
    tol: ToleranceProfile = DEFAULT_TOL,
) -> SystemReport:
    """Certify ``sum_k C_k < inf`` from the first ``N`` components.

    The tail past ``N`` is bounded by ``C_N q / (1 - q)`` with ``q`` the
    largest observed ratio ``C_{k+1}/C_k`` over ``K <= k < N``; the verdict
    is Inconclusive when ``q > q_cap``.
    """
    N = system.N if N is None else N
    if not 1 <= N <= system.N:
        raise ValidationError(f"N={N} must lie in 1..{system.N}")
    if not 1 <= K < N:
        raise IndexRangeError(f"need 1 <= K < N, got K={K}, N={N}")
    if not 0 < q_cap < 1:
        raise ValidationError(f"q_cap must lie in (0, 1), got {q_cap!r}")

    certs = certificates(system, N, tol)
    for cert in certs:
        if not cert.member:
            return SystemReport(N, K, system.tau, math.nan, Verdict.VIOLATED,
                                violated_k=cert.k, q_cap=q_cap, certificates=certs)

    C = [cert.C for cert in certs]
    partial = math.fsum(C)
    report = SystemReport(N, K, system.tau, partial, Verdict.INCONCLUSIVE, q_cap=q_cap, certificates=certs)

    if paranoid:
        rng = random.Random(seed)
        picks = sorted(rng.sample(range(N), max(1, round(0.05 * N))))
        for i in picks:
            cert = certs[i]
            p = ComponentParams(cert.lam, cert.gamma, cert.b, cert.tau)
            q = j_quadrature(p, tol.quad_tol, tol).value
            if abs(q - cert.J) > 1e-6 * (1 + cert.J):
                raise NumericalFailure(
                    f"component {cert.k}: closed form {cert.J!r} disagrees with quadrature {q!r}"
                )
            report.paranoid_checked.append(cert.k)

    # C is 0-based: C[k-1] is C_k
    q = max(_ratio(C[k], C[k - 1]) for k in range(K, N))
    report.empirical_ratio = q
    if q <= q_cap:
        report.tail_bound = C[-1] * q / (1 - q)
        report.global_bound = (1 + system.tau) * (partial + report.tail_bound)
        report.verdict = Verdict.CERTIFIED
    return report


def heat_preset(gamma_rule, b_rule, tau: float, N: int) -> DiagonalDelaySystem:
    """Diagonal heat-rod system with ``lambda_k = -k^2``."""
    return DiagonalDelaySystem(tau, N, "heat", HEAT_LAMBDA, as_rule(gamma_rule), as_rule(b_rule))


def direct_preset(lambda_rule, b_rule, tau: float, N: int) -> DiagonalDelaySystem:
    """Pure-delay system ``z' = A z(t - tau) + B u`` with eigenvalues from ``lambda_rule``."""
    return DiagonalDelaySystem(tau, N, "direct", as_rule(lambda_rule), None, as_rule(b_rule))


@dataclass(frozen=True)
class RatioEstimate:
    numeric: float
    analytic: float


def ratio_limit_estimate(system: DiagonalDelaySystem, K: int, N: int,
                         tol: ToleranceProfile = DEFAULT_TOL) -> RatioEstimate:
    """``C_N / C_{N-1}`` next to the leading-order prediction.

    The prediction is ``|b_N|^2/|b_{N-1}|^2 * |a_{N-1}|/|a_N|`` for retarded
    systems; for the direct preset ``|lambda|`` of the delayed term takes
    the place of ``|a|``, i.e. ``|b_N|^2/|b_{N-1}|^2 * |l_{N-1}|/|l_N|``.
    """
    if not 1 <= K < N:
        raise IndexRangeError(f"need 1 <= K < N, got K={K}, N={N}")
    if N > system.N:
        raise ValidationError(f"N={N} exceeds the system size {system.N}")
    for k in range(K, N + 1):
        cert = _certify(system, k, tol)
        if not cert.member:
            raise NotInRegion(f"component {k} violates the region hypothesis")
    prev, last = _certify(system, N - 1, tol), _certify(system, N, tol)
    numeric = _ratio(last.C, prev.C)
    pb = abs(prev.b) ** 2
    b_ratio = abs(last.b) ** 2 / pb if pb > 0 else math.inf
    if system.preset == "direct":
        scale = abs(prev.gamma) / abs(last.gamma)
    else:
        scale = abs(prev.lam.real) / abs(last.lam.real) if last.lam.real != 0 else math.inf
    return RatioEstimate(numeric, b_ratio * scale)
