import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from delayadm.admissibility import heat_preset, system_check
from delayadm.ddesim import (
    DampedSinusoids,
    Indicator,
    SampledGrid,
    Trajectory,
    extended_norm,
    extended_norm_series,
    input_sq_norm_series,
    integrate_columns,
    parse_input,
    random_damped_input,
    simulate_component,
    simulate_system,
    stable_m,
    verify_bound,
    verify_bound_batch,
)
from delayadm.errors import IncompatibleInit, InvalidArgument, NotInRegion, OffGrid, StepTooCoarse
from delayadm.model import ComponentParams, Geometric
from helpers import BOUND_COMPONENTS

P = ComponentParams
ZERO = DampedSinusoids(())
SMOOTH = DampedSinusoids(((1.0, 0.5, 2.0, 0.0),))


def test_ode_case():
    tr = simulate_component(P(-1, 0, 1, 1), Indicator(0, 1), None, 3.0, 64)
    on = tr.t <= 1
    assert np.max(np.abs(tr.z[on] - (1 - np.exp(-tr.t[on])))) <= 1e-8
    assert abs(tr.z[64] - 0.6321205588285577) < 1e-8
    off = tr.t >= 1
    exact = (1 - math.exp(-1)) * np.exp(-(tr.t[off] - 1))
    assert np.max(np.abs(tr.z[off] - exact)) <= 1e-8


def test_zero_input_zero_state():
    tr = simulate_component(P(-1, 0.3, 1, 1), ZERO, None, 5.0, 16)
    assert not np.any(tr.z)


def test_first_delay_interval_by_hand():
    tr = simulate_component(P(0, -1, 0, 1), ZERO, (1.0, lambda s: 1.0), 2.0, 16)
    first = tr.t <= 1
    assert np.max(np.abs(tr.z[first] - (1 - tr.t[first]))) < 1e-13
    assert abs(tr.z[16]) < 1e-13
    # second interval: z' = -(1 - (t - 1)) so z = -(t-1) + (t-1)^2/2
    s = tr.t[16:] - 1
    assert np.max(np.abs(tr.z[16:] - (-s + s * s / 2))) < 1e-13


def test_init_errors():
    with pytest.raises(IncompatibleInit):
        simulate_component(P(-1, 0.3), ZERO, (1.0, lambda s: 0.0), 1.0, 16)
    with pytest.raises(StepTooCoarse):
        simulate_component(P(-1, 0.3), ZERO, None, 1.0, 4)
    with pytest.raises(StepTooCoarse):
        simulate_component(P(-400, 0.3), ZERO, None, 1.0, 64)
    with pytest.raises(InvalidArgument):
        simulate_component(P(-1, 0.3), ZERO, (0.0, np.zeros(5)), 1.0, 16)


def test_history_samples_accepted():
    m = 32
    hist = np.linspace(0, 1, m + 1)
    tr = simulate_component(P(-1, 0.3), ZERO, (1.0, hist), 1.0, m)
    assert np.array_equal(tr.history, hist) and tr.z[0] == 1.0
    assert tr.full.shape == (2 * m + 1,)


def test_extended_norm_examples():
    m, tau = 64, 1.0
    t = np.arange(-m, m + 1) * tau / m
    tr = Trajectory(tau, m, t[m:], np.exp(-t[m:]), np.exp(-t[: m + 1]))
    exact = math.exp(-2) + (1 - math.exp(-2)) / 2
    assert abs(extended_norm(tr, 1.0) - exact) <= 1e-8
    const = Trajectory(tau, m, t[m:], np.full(m + 1, 2 + 1j), np.full(m + 1, 2 + 1j))
    assert abs(extended_norm(const, 0.5) - 5 * 2) < 1e-13
    zero = Trajectory(tau, m, t[m:], np.zeros(m + 1), np.zeros(m + 1))
    assert extended_norm(zero, 1.0) == 0
    with pytest.raises(OffGrid):
        extended_norm(tr, 0.5 + 1e-3)
    with pytest.raises(OffGrid):
        extended_norm(tr, 2.0)


@pytest.mark.parametrize("m", [63, 64])
def test_window_rules(m):
    tau = 2.0
    t = np.arange(-m, 3 * m + 1) * tau / m
    z = np.cos(t)
    series = extended_norm_series(z, m, tau / m)
    ts = t[m:]
    exact = np.cos(ts) ** 2 + 0.5 * tau + 0.25 * (np.sin(2 * ts) - np.sin(2 * (ts - tau)))
    tol = 1e-3 if m % 2 else 1e-7
    assert np.max(np.abs(series - exact)) < tol


def test_convergence_order():
    p = P(-1, 0.3, 1, 1)
    ref = simulate_component(p, SMOOTH, None, 5.0, 1024).z[-1]
    errs = [abs(simulate_component(p, SMOOTH, None, 5.0, m).z[-1] - ref) for m in (16, 32, 64, 128)]
    rates = [math.log2(e0 / e1) for e0, e1 in zip(errs, errs[1:])]
    assert min(rates) >= 3.7


def test_kinked_input_keeps_order():
    # the off-grid jump at t=0.3 forces step splitting
    p = P(-1, 0.3, 1, 1)
    u = Indicator(0.3, 1.7, 1 - 1j)
    ref = simulate_component(p, u, None, 5.0, 2048).z[-1]
    errs = [abs(simulate_component(p, u, None, 5.0, m).z[-1] - ref) for m in (32, 64, 128)]
    assert errs[-1] < 1e-11 and errs[0] / errs[-1] > 2 ** (2 * 3.5)


def test_far_delay_echo_of_short_pulse():
    # the pulse edge at 1.05 keeps echoing past the tracked kinks; steps there must still split
    p = P(-2, 0.5, 1, 1)
    tr = simulate_component(p, Indicator(1, 1.05, 5), None, 10.0, 128)
    ref = simulate_component(p, Indicator(1, 1.05, 5), None, 10.0, 1024)
    assert np.max(np.abs(tr.z - ref.z[::8])) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_linearity(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    u1, u2 = random_damped_input(rng), random_damped_input(rng)
    combo = DampedSinusoids(
        tuple((alpha * a, d, f, ph) for a, d, f, ph in u1.terms)
        + tuple((beta * a, d, f, ph) for a, d, f, ph in u2.terms)
    )
    p = P(-0.5 + 1j, 0.4, 1.5, 1)
    z1 = simulate_component(p, u1, None, 4.0, 32).z
    z2 = simulate_component(p, u2, None, 4.0, 32).z
    z = simulate_component(p, combo, None, 4.0, 32).z
    assert np.max(np.abs(z - (alpha * z1 + beta * z2))) <= 1e-10 * (1 + np.max(np.abs(z)))


def test_verify_examples():
    rep = verify_bound(P(-1, 0.3, 1, 1), Indicator(0, 2), 30.0, 64)
    assert rep.passed and 0 < rep.sup_ratio <= 1
    assert verify_bound(P(-1, 0.3, 1, 1), ZERO, 10.0, 16).sup_ratio == 0
    with pytest.raises(NotInRegion):
        verify_bound(P(0, -1.6), Indicator(0, 1), 10.0, 16)


def test_verify_batch_matches_single():
    rng = np.random.default_rng(7)
    inputs = [random_damped_input(rng) for _ in range(4)]
    comps = BOUND_COMPONENTS[:4]
    batch = verify_bound_batch(comps, inputs, 8.0, 32)
    for p, u, r in zip(comps, inputs, batch):
        assert verify_bound(p, u, 8.0, 32).sup_ratio == pytest.approx(r.sup_ratio, rel=1e-12)


@pytest.mark.parametrize("p", BOUND_COMPONENTS, ids=lambda p: f"{p.lam}_{p.gamma}_{p.tau}")
def test_random_inputs_respect_bound(p):
    rng = np.random.default_rng(abs(hash((p.lam, p.gamma, p.tau))) % 2**32)
    inputs = [random_damped_input(rng) for _ in range(20)]
    m = stable_m(p.lam, p.gamma, p.tau, 32)
    for r in verify_bound_batch([p] * len(inputs), inputs, 15.0, m):
        assert 0 <= r.sup_ratio <= 1 + 1e-3


def test_unstable_growth_matches_dominant_root():
    # principal root of s + 1.6 e^{-s} = 0 is 0.0131137 +- 1.5791i
    tr = simulate_component(P(0, -1.6, 1, 1), Indicator(0, 1), None, 200.0, 64)
    n = extended_norm_series(tr.full, tr.m, tr.dt)
    k = lambda t: int(round(t / tr.dt))  # noqa: E731
    # average out the oscillation over one period window
    period = int(round(2 * math.pi / 1.5791 / tr.dt))
    mean = lambda t: n[k(t): k(t) + period].mean()  # noqa: E731
    rate = math.log(mean(180.0) / mean(80.0)) / 100.0
    assert abs(rate - 2 * 0.013113669) < 2e-4


def test_system_consistency():
    sys_ = heat_preset(0.1, Geometric(0.5), 1.0, 40)
    rep = system_check(sys_, 40, 10)
    st_ = simulate_system(sys_, Indicator(0, 1), 20, 10.0, 64)
    assert st_.m == stable_m([c.lam for c in sys_.components(20)], 0.1, 1.0, 64)
    assert np.all(st_.aggregate <= rep.global_bound * st_.input_sq_norm * (1 + 1e-9) + 1e-15)


def test_system_n1_is_component():
    sys_ = heat_preset(0.1, Geometric(0.5), 1.0, 5)
    st_ = simulate_system(sys_, SMOOTH, 1, 5.0, 32)
    tr = simulate_component(sys_.component(1), SMOOTH, None, 5.0, 32)
    assert np.array_equal(st_.z[:, 0], tr.z)
    assert np.array_equal(st_.norms[:, 0], extended_norm_series(tr.full, 32, tr.dt))


def test_system_zero_input():
    sys_ = heat_preset(0.1, Geometric(0.5), 1.0, 5)
    assert not np.any(simulate_system(sys_, ZERO, 5, 3.0, 32).aggregate)


def test_inputs():
    u = Indicator(1, 2, 3)
    assert u(1.0, 1) == 3 and u(1.0, -1) == 0 and u(2.0, -1) == 3 and u(2.0, 1) == 0
    g = SampledGrid(0.5, (0, 1, 0))
    assert g(0.25) == 0.5 and g(2.0) == 0 and g.breakpoints == (0.0, 1.0)
    t = np.linspace(0, 3, 13)
    assert np.allclose(input_sq_norm_series([u], t)[:, 0], 9 * np.clip(t - 1, 0, 1))
    with pytest.raises(InvalidArgument):
        DampedSinusoids(((1, 0.0, 1, 0),))


@pytest.mark.parametrize("text", ["indicator:0:2:1", "indicator:0:2", "damped:1:0.5:2:0", "damped:1+i:0.5:2:0;2:1:0:0@4", "zero"])
def test_parse_input(text):
    parse_input(text)


@pytest.mark.parametrize("text", ["", "indicator:0", "damped:1:2", "sine:1", "indicator:2:1:1", "zero:1"])
def test_parse_input_errors(text):
    with pytest.raises(InvalidArgument):
        parse_input(text)


def test_batch_column_independence():
    lam = np.array([-1, -2 + 1j])
    gam = np.array([0.3, 0.5j])
    b = np.array([1, 2])
    t, Z = integrate_columns(lam, gam, b, [SMOOTH, Indicator(0, 1)], 1.0, 16, 3.0)
    for c in range(2):
        _, Zc = integrate_columns(lam[c:c + 1], gam[c:c + 1], b[c:c + 1], [[SMOOTH, Indicator(0, 1)][c]], 1.0, 16, 3.0)
        assert np.array_equal(Z[:, c], Zc[:, 0])
