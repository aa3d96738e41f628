"""Fixed-step simulation of ``z' = lam z + gamma z(t - tau) + b u`` and bound checks.

The step is ``dt = tau/m`` so delayed reads at step ends land on stored
nodes. Stage values at half steps come from a four-node Lagrange stencil
kept inside a single smooth piece of the solution: ``z`` is only
piecewise smooth, with kinks at ``t = 0``, at input discontinuities
``t_d`` and at their delay echoes ``t_d + k tau``. Steps are split at any
such point that is not a node. Several components (and inputs) are
integrated together as columns of one array.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .admissibility import component_bound
from .errors import IncompatibleInit, InvalidArgument, NotInRegion, OffGrid, StepTooCoarse
from .model import DEFAULT_TOL, ComponentParams, DiagonalDelaySystem, ToleranceProfile, validate_component

# RK4 stays stable on the negative real axis up to about 2.78
STABILITY_LIMIT = 2.5
_ECHOES = 4


# ---------------------------------------------------------------------------
# inputs


@dataclass(frozen=True)
class Indicator:
    """``amplitude`` on ``[t0, t1)``, zero elsewhere."""

    t0: float
    t1: float
    amplitude: complex = 1.0

    def __post_init__(self):
        if not (0 <= self.t0 <= self.t1 and math.isfinite(self.t1)):
            raise InvalidArgument(f"indicator needs 0 <= t0 <= t1 < inf, got [{self.t0}, {self.t1}]")

    @property
    def breakpoints(self):
        return (self.t0, self.t1)

    @property
    def support_end(self):
        return self.t1

    def __call__(self, t, side=1):
        t = np.asarray(t, dtype=float)
        if side > 0:
            inside = (t >= self.t0) & (t < self.t1)
        else:
            inside = (t > self.t0) & (t <= self.t1)
        return np.where(inside, complex(self.amplitude), 0j)

    def sq_norm(self, t):
        """Exact ``int_0^t |u|^2``."""
        t = np.asarray(t, dtype=float)
        return abs(self.amplitude) ** 2 * np.clip(t - self.t0, 0.0, self.t1 - self.t0)


@dataclass(frozen=True)
class DampedSinusoids:
    """``sum_j amp_j exp(-decay_j t) cos(freq_j t + phase_j)`` on ``[0, cutoff)``.

    ``terms`` holds ``(amp, decay, freq, phase)`` tuples; an empty sum is
    the zero input.
    """

    terms: tuple = ()
    cutoff: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(tuple(term) for term in self.terms))
        for amp, decay, freq, phase in self.terms:
            if decay < 0:
                raise InvalidArgument("decay rates must be non-negative for an L2 input")
            if decay == 0 and not math.isfinite(self.cutoff):
                raise InvalidArgument("undamped terms need a finite cutoff")

    @property
    def breakpoints(self):
        return (self.cutoff,) if math.isfinite(self.cutoff) else ()

    @property
    def support_end(self):
        return self.cutoff

    def _arrays(self):
        if not self.terms:
            return np.zeros(0, complex), np.zeros(0), np.zeros(0), np.zeros(0)
        amp, decay, freq, phase = zip(*self.terms)
        return (np.asarray(amp, complex), np.asarray(decay, float),
                np.asarray(freq, float), np.asarray(phase, float))

    def __call__(self, t, side=1):
        amp, decay, freq, phase = self._arrays()
        t = np.asarray(t, dtype=float)
        tt = t[..., None]
        val = np.sum(amp * np.exp(-decay * tt) * np.cos(freq * tt + phase), axis=-1)
        live = (t < self.cutoff) if side > 0 else (t <= self.cutoff)
        return np.where(live & (t >= 0), val, 0j)


@dataclass(frozen=True)
class SampledGrid:
    """Piecewise-linear interpolation of samples on ``t0 + i*dt``; zero after the last sample."""

    dt: float
    values: tuple
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
        if self.dt <= 0 or len(self.values) < 2:
            raise InvalidArgument("sampled input needs dt > 0 and at least two samples")

    @property
    def breakpoints(self):
        return (self.t0, self.support_end)

    @property
    def support_end(self):
        return self.t0 + self.dt * (len(self.values) - 1)

    def __call__(self, t, side=1):
        t = np.asarray(t, dtype=float)
        grid = self.t0 + self.dt * np.arange(len(self.values))
        v = np.asarray(self.values)
        val = np.interp(t, grid, v.real) + 1j * np.interp(t, grid, v.imag)
        if side > 0:
            live = (t >= self.t0) & (t < self.support_end)
        else:
            live = (t > self.t0) & (t <= self.support_end)
        return np.where(live, val, 0j)


InputSignal = Union[Indicator, DampedSinusoids, SampledGrid]


def parse_input(text: str) -> InputSignal:
    """Parse CLI input specs.

    ``indicator:T0:T1:AMP``, ``damped:AMP:DECAY:FREQ:PHASE[;AMP:DECAY:FREQ:PHASE...]``
    (an optional trailing ``@CUTOFF`` limits the support) or ``zero``.
    """
    from .model import parse_complex

    kind, _, rest = text.strip().partition(":")
    try:
        if kind == "zero" and not rest:
            return DampedSinusoids(())
        if kind == "indicator":
            parts = rest.split(":")
            if len(parts) not in (2, 3):
                raise ValueError
            amp = parse_complex(parts[2]) if len(parts) == 3 else 1.0
            return Indicator(float(parts[0]), float(parts[1]), amp)
        if kind == "damped":
            body, _, cut = rest.partition("@")
            terms = []
            for chunk in body.split(";"):
                amp, decay, freq, phase = chunk.split(":")
                terms.append((parse_complex(amp), float(decay), float(freq), float(phase)))
            return DampedSinusoids(tuple(terms), float(cut) if cut else math.inf)
    except (ValueError, TypeError):
        pass
    raise InvalidArgument(f"malformed input spec {text!r}")


def random_damped_input(rng: np.random.Generator, n_terms: int = 3) -> DampedSinusoids:
    """A random finite sum of damped complex sinusoids."""
    terms = []
    for _ in range(n_terms):
        amp = complex(rng.normal(), rng.normal())
        terms.append((amp, float(rng.uniform(0.05, 1.5)), float(rng.uniform(0.0, 6.0)),
                      float(rng.uniform(-math.pi, math.pi))))
    return DampedSinusoids(tuple(terms))


class _InputStack:
    """Evaluate one input per column."""

    def __init__(self, inputs: Sequence[InputSignal]):
        self.inputs = list(inputs)
        self._fast = None
        if self.inputs and all(isinstance(u, DampedSinusoids) and not math.isfinite(u.cutoff)
                               for u in self.inputs):
            width = max((len(u.terms) for u in self.inputs), default=0)
            amp = np.zeros((len(self.inputs), width), complex)
            decay = np.zeros((len(self.inputs), width))
            freq = np.zeros((len(self.inputs), width))
            phase = np.zeros((len(self.inputs), width))
            for i, u in enumerate(self.inputs):
                for j, (a_, d_, f_, p_) in enumerate(u.terms):
                    amp[i, j], decay[i, j], freq[i, j], phase[i, j] = a_, d_, f_, p_
            self._fast = (amp, decay, freq, phase)

    @property
    def breakpoints(self):
        pts = set()
        for u in self.inputs:
            pts.update(float(p) for p in u.breakpoints)
        return sorted(pts)

    def __call__(self, t: float, side: int = 1) -> np.ndarray:
        if self._fast is not None:
            amp, decay, freq, phase = self._fast
            if t < 0:
                return np.zeros(len(self.inputs), complex)
            return np.sum(amp * np.exp(-decay * t) * np.cos(freq * t + phase), axis=1)
        return np.array([complex(u(t, side)) for u in self.inputs])


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    """Samples of one component on ``{0, dt, ..., t_end}`` plus the initial history."""

    tau: float
    m: int
    t: np.ndarray
    z: np.ndarray
    history: np.ndarray

    @property
    def dt(self) -> float:
        return self.tau / self.m

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def full(self) -> np.ndarray:
        """Values on ``{-tau, ..., t_end}``; ``full[m]`` is ``z(0)``."""
        return np.concatenate([self.history[:-1], self.z])


@dataclass
class SystemTrajectory:
    tau: float
    m: int
    t: np.ndarray
    z: np.ndarray  # (steps + 1, N)
    norms: np.ndarray  # per-component extended norms, (steps + 1, N)
    input_sq_norm: np.ndarray  # int_0^t |u|^2

    @property
    def aggregate(self) -> np.ndarray:
        return np.sum(self.norms, axis=1)

    def component(self, k: int) -> Trajectory:
        hist = np.zeros(self.m + 1, complex)
        return Trajectory(self.tau, self.m, self.t, self.z[:, k - 1], hist)


@dataclass
class BoundCheckReport:
    sup_ratio: float
    t_at_max: float
    J_used: float
    passed: bool
    tolerance: float = 1e-3
    ratios: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self):
        return {
            "sup_ratio": self.sup_ratio,
            "t_at_max": self.t_at_max,
            "J_used": self.J_used,
            "passed": self.passed,
            "tolerance": self.tolerance,
        }


def _lagrange_weights(nodes: np.ndarray, x: float) -> np.ndarray:
    w = np.ones(len(nodes))
    for i, xi in enumerate(nodes):
        for j, xj in enumerate(nodes):
            if i != j:
                w[i] *= (x - xj) / (xi - xj)
    return w


def _check_step(lam, gam, tau, m):
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 8:
        raise StepTooCoarse(f"m must be an integer >= 8, got {m!r}")
    stiff = float(np.max(np.abs(lam) + np.abs(gam))) * tau / m
    if stiff > STABILITY_LIMIT:
        need = int(math.ceil((np.max(np.abs(lam) + np.abs(gam))) * tau / STABILITY_LIMIT))
        raise StepTooCoarse(f"(|lambda|+|gamma|)*dt = {stiff:.3g} exceeds {STABILITY_LIMIT}; use m >= {need}")


def stable_m(lam, gam, tau: float, m: int) -> int:
    """Smallest ``m * 2**j`` that passes the explicit stability guard."""
    lam, gam = np.atleast_1d(lam), np.atleast_1d(gam)
    scale = float(np.max(np.abs(lam) + np.abs(gam))) * tau
    while scale / m > STABILITY_LIMIT:
        m *= 2
    return m


def _merge_close(times, eps):
    out = []
    for t in sorted(times):
        if not out or t - out[-1] > eps:
            out.append(t)
    return out


def integrate_columns(lam, gam, b, inputs: Sequence[InputSignal], tau: float, m: int, t_end: float,
                      x0=None, history=None):
    """Integrate independent scalar components, one per column.

    Returns ``(t, Z)`` where ``Z`` has ``m + steps + 1`` rows: row ``j`` is
    time ``(j - m) dt``, so rows ``0..m`` are the history on ``[-tau, 0]``.
    """
    lam = np.atleast_1d(np.asarray(lam, complex))
    gam = np.atleast_1d(np.asarray(gam, complex))
    b = np.atleast_1d(np.asarray(b, complex))
    B = lam.size
    if not (gam.size == b.size == B == len(inputs)):
        raise InvalidArgument("parameter arrays and inputs must have one entry per column")
    if not tau > 0:
        raise InvalidArgument(f"tau must be positive, got {tau!r}")
    _check_step(lam, gam, tau, m)
    if not (math.isfinite(t_end) and t_end >= 0):
        raise InvalidArgument(f"t_end must be finite and non-negative, got {t_end!r}")
    dt = tau / m
    steps = int(math.ceil(t_end / dt - 1e-9))
    Z = np.zeros((m + steps + 1, B), complex)
    if history is not None:
        Z[: m + 1] = np.asarray(history, complex).reshape(m + 1, -1)
    if x0 is not None:
        Z[m] = x0
    u = _InputStack(inputs)

    # kink times of z (the history piece [-tau, 0] is assumed smooth)
    horizon = steps * dt
    kinks = {0.0}
    for k in range(1, _ECHOES + 1):
        kinks.add(k * tau)
    for td in u.breakpoints:
        if 0 < td < horizon:
            for k in range(_ECHOES + 1):
                kinks.add(td + k * tau)
    node_eps = 1e-9 * dt
    kinks = _merge_close([t for t in kinks if t <= horizon + 1e-12 * max(1.0, horizon)], node_eps)
    # a step is split at every off-grid kink, and one delay later so that
    # no delayed read straddles a kink beyond the tracked echoes
    split_times = _merge_close(kinks + [kt + tau for kt in kinks if kt + tau <= horizon], node_eps)
    splits = {}
    for kt in split_times:
        n = int(math.floor(kt / dt))
        if abs(kt - n * dt) > node_eps and abs(kt - (n + 1) * dt) > node_eps:
            splits.setdefault(n, []).append(kt)
    pieces = [-tau] + kinks + [math.inf]

    def delayed(s, lo_t, hi_t, row_max):
        """z(s) from stored rows, with the stencil inside the piece [lo_t, hi_t]."""
        x = s / dt + m  # fractional row index
        j = round(x)
        if abs(x - j) < 1e-9:
            return Z[j]
        j_lo = int(math.ceil(lo_t / dt + m - 1e-9))
        j_hi = row_max if math.isinf(hi_t) else min(int(math.floor(hi_t / dt + m + 1e-9)), row_max)
        count = min(4, j_hi - j_lo + 1)
        start = int(math.floor(x)) - 1
        start = max(j_lo, min(start, j_hi - count + 1))
        idx = np.arange(start, start + count)
        w = _lagrange_weights(idx.astype(float), x)
        return w @ Z[start:start + count]

    def piece_of(a_, b_):
        i = bisect.bisect_right(pieces, a_ + node_eps) - 1
        lo_t = pieces[i]
        hi_t = pieces[i + 1]
        if b_ > hi_t + node_eps:
            raise AssertionError("substep straddles a kink")  # splitting guarantees otherwise
        return lo_t, hi_t

    for n in range(steps):
        row = m + n
        t_n = n * dt
        bounds = [t_n] + splits.get(n, []) + [t_n + dt]
        y = Z[row]
        for t0, t1 in zip(bounds[:-1], bounds[1:]):
            h = t1 - t0
            lo_t, hi_t = piece_of(t0 - tau, t1 - tau)
            tm = t0 + 0.5 * h
            d0 = delayed(t0 - tau, lo_t, hi_t, row)
            dm = delayed(tm - tau, lo_t, hi_t, row)
            d1 = delayed(t1 - tau, lo_t, hi_t, row)
            u0, um, u1 = u(t0, 1), u(tm, 1), u(t1, -1)
            k1 = lam * y + gam * d0 + b * u0
            k2 = lam * (y + 0.5 * h * k1) + gam * dm + b * um
            k3 = lam * (y + 0.5 * h * k2) + gam * dm + b * um
            k4 = lam * (y + h * k3) + gam * d1 + b * u1
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        Z[row + 1] = y
    t = dt * np.arange(steps + 1)
    return t, Z


def input_sq_norm_series(inputs: Sequence[InputSignal], t: np.ndarray) -> np.ndarray:
    """``int_0^{t_n} |u|^2`` per column, by Simpson's rule on each step.

    Steps are split at input discontinuities, which are integrated with
    one-sided limits. Indicators use their exact value.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros((len(t), len(inputs)))
    for c, u in enumerate(inputs):
        if isinstance(u, Indicator):
            out[:, c] = u.sq_norm(t)
            continue
        inner = np.array([p for p in u.breakpoints if t[0] < p < t[-1]], dtype=float)
        knots = np.union1d(t, inner)
        lo, hi = knots[:-1], knots[1:]
        f0 = np.abs(u(lo, 1)) ** 2
        fm = np.abs(u(0.5 * (lo + hi), 1)) ** 2
        f1 = np.abs(u(hi, -1)) ** 2
        acc = np.concatenate([[0.0], np.cumsum((hi - lo) / 6.0 * (f0 + 4 * fm + f1))])
        out[:, c] = acc[np.searchsorted(knots, t)]
    return out


def _window_integral(g: np.ndarray, m: int, dt: float) -> np.ndarray:
    """``int`` of samples ``g`` over every window of ``m`` intervals ending at rows ``m..``.

    Composite Simpson when ``m`` is even, trapezoid otherwise. ``g`` may be
    2-D (rows x columns).
    """
    g = np.asarray(g, dtype=float)
    rows = g.shape[0]
    starts = np.arange(rows - m)
    zero = np.zeros((1,) + g.shape[1:])
    if m % 2:
        cs = np.concatenate([zero, np.cumsum(g, axis=0)])
        total = cs[starts + m + 1] - cs[starts]
        return dt * (total - 0.5 * (g[starts] + g[starts + m]))
    even = g.copy()
    even[1::2] = 0
    odd = g - even
    ce = np.concatenate([zero, np.cumsum(even, axis=0)])
    co = np.concatenate([zero, np.cumsum(odd, axis=0)])

    def parity_sum(lo, hi, parity):
        # sum over rows lo..hi-1 with row % 2 == parity (vectorised in lo/hi)
        c = np.where((parity == 0)[(...,) + (None,) * (g.ndim - 1)], ce[hi] - ce[lo], co[hi] - co[lo])
        return c

    odd_par = (starts + 1) % 2
    s_odd = parity_sum(starts + 1, starts + m, odd_par)
    s_even = parity_sum(starts + 2, starts + m - 1, starts % 2)
    return dt / 3.0 * (g[starts] + g[starts + m] + 4 * s_odd + 2 * s_even)


def extended_norm_series(full: np.ndarray, m: int, dt: float) -> np.ndarray:
    """``|z(t)|^2 + int_{t-tau}^t |z|^2`` at every grid time ``t >= 0``."""
    g = np.abs(full) ** 2
    return g[m:] + _window_integral(g, m, dt)


def extended_norm(tr: Trajectory, t: float) -> float:
    """Squared norm of the extended state ``(z(t), z_t)`` at grid time ``t``."""
    n = round(t / tr.dt)
    if t < 0 or n >= len(tr.t) or abs(n * tr.dt - t) > 1e-9 * max(1.0, abs(t)):
        raise OffGrid(f"t={t!r} is not a trajectory grid time")
    window = tr.full[n: n + tr.m + 1]
    return float(extended_norm_series(window, tr.m, tr.dt)[0])


def simulate_component(
    p: ComponentParams,
    u: InputSignal,
    init=None,
    t_end: float = 10.0,
    m: int = 64,
    tol: ToleranceProfile = DEFAULT_TOL,
) -> Trajectory:
    """Simulate one component from ``init = (x, f)``.

    ``f`` is either a callable on ``[-tau, 0]`` or ``m + 1`` samples on the
    history grid; ``None`` means zero initial data.
    """
    validate_component(p)
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 8:
        raise StepTooCoarse(f"m must be an integer >= 8, got {m!r}")
    hist = np.zeros(m + 1, complex)
    x = 0j
    if init is not None:
        x, f = init
        x = complex(x)
        if callable(f):
            grid = -p.tau + (p.tau / m) * np.arange(m + 1)
            hist = np.array([complex(f(s)) for s in grid])
        else:
            hist = np.asarray(f, complex)
            if hist.shape != (m + 1,):
                raise InvalidArgument(f"history needs {m + 1} samples, got {hist.shape}")
        if abs(hist[-1] - x) > tol.root_tol:
            raise IncompatibleInit(f"f(0)={hist[-1]!r} differs from x={x!r}")
        hist[-1] = x
    t, Z = integrate_columns([p.lam], [p.gamma], [p.b], [u], p.tau, m, t_end, history=hist[:, None])
    return Trajectory(p.tau, m, t, Z[m:, 0].copy(), Z[: m + 1, 0].copy())


def _bound_ratios(norms, in_sq, scale):
    denom = scale * in_sq
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(denom > 0, norms / denom, np.where(norms > 0, np.inf, 0.0))
    return ratio


def verify_bound_batch(
    params: Sequence[ComponentParams],
    inputs: Sequence[InputSignal],
    t_end: float,
    m: int,
    tolerance: float = 1e-3,
    tol: ToleranceProfile = DEFAULT_TOL,
) -> list[BoundCheckReport]:
    """:func:`verify_bound` for many ``(component, input)`` pairs in one pass."""
    certs = [component_bound(p, tol=tol) for p in params]
    for p, cert in zip(params, certs):
        if not cert.member:
            raise NotInRegion(f"component {p!r} is not certified; the bound does not apply")
    taus = {p.tau for p in params}
    if len(taus) != 1:
        raise InvalidArgument("batched components must share tau")
    tau = taus.pop()
    t, Z = integrate_columns([p.lam for p in params], [p.gamma for p in params],
                             [p.b for p in params], inputs, tau, m, t_end)
    norms = extended_norm_series(Z, m, tau / m)
    in_sq = input_sq_norm_series(inputs, t)
    reports = []
    for c, (p, cert) in enumerate(zip(params, certs)):
        scale = (1 + tau) * abs(p.b) ** 2 * cert.J
        ratio = _bound_ratios(norms[:, c], in_sq[:, c], scale)
        i = int(np.argmax(ratio))
        sup = float(ratio[i])
        reports.append(BoundCheckReport(sup, float(t[i]), cert.J, sup <= 1 + tolerance, tolerance, ratio))
    return reports


def verify_bound(
    p: ComponentParams,
    u: InputSignal,
    t_end: float,
    m: int = 64,
    tolerance: float = 1e-3,
    tol: ToleranceProfile = DEFAULT_TOL,
) -> BoundCheckReport:
    """Check ``||state(t)||^2 <= (1+tau)|b|^2 J ||u||^2_{L2(0,t)}`` along a zero-start run."""
    return verify_bound_batch([p], [u], t_end, m, tolerance, tol)[0]


def simulate_system(
    system: DiagonalDelaySystem,
    u: InputSignal,
    N: Optional[int] = None,
    t_end: float = 10.0,
    m: int = 64,
) -> SystemTrajectory:
    """Zero-start simulation of the first ``N`` components under a common input.

    ``m`` is doubled until the explicit stability guard holds for every
    component, so the returned ``m`` may exceed the requested one.
    """
    N = system.N if N is None else N
    comps = system.components(N)
    lam = np.array([c.lam for c in comps])
    gam = np.array([c.gamma for c in comps])
    m_used = stable_m(lam, gam, system.tau, m)
    t, Z = integrate_columns(lam, gam, [c.b for c in comps], [u] * N, system.tau, m_used, t_end)
    norms = extended_norm_series(Z, m_used, system.tau / m_used)
    in_sq = input_sq_norm_series([u], t)[:, 0]
    return SystemTrajectory(system.tau, m_used, t, Z[m_used:], norms, in_sq)


def trajectory_csv_rows(tr: Trajectory):
    norms = extended_norm_series(tr.full, tr.m, tr.dt)
    for ti, zi, ni in zip(tr.t, tr.z, norms):
        yield (ti, zi.real, zi.imag, ni)
