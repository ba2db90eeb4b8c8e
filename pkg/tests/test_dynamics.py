import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ddtea.dynamics import (
    EPS_ALPHA_FLOOR,
    EPS_ALPHA_HORIZON,
    EPS_ALPHA_REL,
    BlowUpError,
    InvalidParameterError,
    ThieleParams,
    blow_up_time,
    evolve_closed_form,
    evolve_rk4,
    rk4_grid,
    steady_state,
    trace,
)

# Frozen from a fixed-step RK4 run of ds/dt = s - 4 s^3 at step 1e-6
# (0.24259137615303442); the substitution u = s**-2 gives 1/sqrt(4 + 96 e^-2).
RK4_ORACLE_S1 = 0.24259137615303442


def limit_formula(beta, n, s0, t):
    return s0 * (1 - n * beta * s0**n * t) ** (-1 / n)


def bernoulli_radicand(alpha, beta, n, s0, t):
    """Denominator radicand written literally, for bisection."""
    r = s0**n / (alpha / beta)
    return (1 + r) * math.exp(-n * alpha * t) - r


class TestClosedForm:
    def test_growth_to_limit_cycle_matches_rk4_oracle(self):
        s = evolve_closed_form(ThieleParams(1.0, -4.0, 2), 0.1, 1.0)
        assert s == pytest.approx(RK4_ORACLE_S1, rel=1e-12)
        assert s == pytest.approx(1 / math.sqrt(4 + 96 * math.exp(-2)), rel=1e-14)

    @given(
        alpha=st.floats(-1e9, 1e9),
        beta=st.floats(-1e9, 1e9),
        n=st.floats(0.1, 5),
        dt=st.floats(0, 1e-6),
    )
    def test_centred_vortex_stays_centred(self, alpha, beta, n, dt):
        assert evolve_closed_form(ThieleParams(alpha, beta, n), 0.0, dt) == 0.0

    def test_alpha_zero_limit(self):
        s = evolve_closed_form(ThieleParams(0.0, -4.0, 2), 0.5, 1.5)
        assert s == pytest.approx(0.25, rel=1e-15)
        oracle = evolve_rk4(ThieleParams(1e-12, -4.0, 2), 0.5, 1.5, 1e-5)
        assert s == pytest.approx(oracle, rel=1e-9)

    def test_blow_up_time(self):
        with pytest.raises(BlowUpError) as info:
            evolve_closed_form(ThieleParams(1.0, 1.0, 2), 1.0, 1.0)
        assert info.value.t_star == pytest.approx(math.log(2) / 2, abs=1e-12)

    def test_blow_up_below_unstable_threshold_is_not_flagged(self):
        # alpha < 0 < beta: s0 under (-alpha/beta)**(1/n) decays
        p = ThieleParams(-1.0, 1.0, 2)
        assert evolve_closed_form(p, 0.5, 10.0) < 0.5
        assert blow_up_time(p, 0.5) is None
        # and above it, diverges
        with pytest.raises(BlowUpError) as info:
            evolve_closed_form(p, 2.0, 10.0)
        assert info.value.t_star == pytest.approx(blow_up_time(p, 2.0), rel=1e-12)

    def test_zero_time_returns_start(self):
        assert evolve_closed_form(ThieleParams(3.0, -1.0, 1.5), 0.3, 0.0) == 0.3

    @pytest.mark.parametrize(
        "p,s0,dt",
        [
            (ThieleParams(1, -1, 2), -0.1, 1.0),
            (ThieleParams(1, -1, 2), 0.1, -1.0),
            (ThieleParams(1, -1, 2), math.nan, 1.0),
            (ThieleParams(1, -1, 2), 0.1, math.inf),
        ],
    )
    def test_invalid_state(self, p, s0, dt):
        with pytest.raises(InvalidParameterError):
            evolve_closed_form(p, s0, dt)

    @pytest.mark.parametrize("alpha,beta,n", [(math.nan, 1, 2), (1, math.inf, 2), (1, 1, 0), (1, 1, -2), (1, 1, math.inf)])
    def test_invalid_params(self, alpha, beta, n):
        with pytest.raises(InvalidParameterError):
            ThieleParams(alpha, beta, n)

    def test_large_times_do_not_overflow(self):
        assert evolve_closed_form(ThieleParams(1e8, -4e8, 2), 0.1, 1.0) == pytest.approx(0.5, rel=1e-15)
        assert evolve_closed_form(ThieleParams(-1e8, -4e8, 2), 0.1, 1.0) == 0.0


class TestSteadyState:
    def test_limit_cycle(self):
        assert steady_state(ThieleParams(1.0, -4.0, 2)) == pytest.approx(0.5, rel=1e-15)

    def test_decay(self):
        assert steady_state(ThieleParams(-1.0, -4.0, 2)) == 0.0

    def test_unbounded(self):
        assert steady_state(ThieleParams(1.0, 2.0, 2)) is None
        assert steady_state(ThieleParams(1.0, 0.0, 2)) is None

    def test_is_fixed_point(self):
        p = ThieleParams(1.0, -4.0, 2)
        s = steady_state(p)
        assert p.alpha * s + p.beta * s ** (p.n + 1) == pytest.approx(0.0, abs=1e-15)


class TestRK4:
    def test_agrees_with_closed_form(self):
        p = ThieleParams(1.0, -4.0, 2)
        coarse = evolve_rk4(p, 0.1, 1.0, 1e-4)
        assert coarse == pytest.approx(evolve_closed_form(p, 0.1, 1.0), rel=1e-8)
        # self-consistency at a second step size
        assert coarse == pytest.approx(evolve_rk4(p, 0.1, 1.0, 5e-5), rel=1e-10)

    def test_decay_value(self):
        # 1/sqrt(8 e^4 - 4) from the u = s**-2 substitution
        s = evolve_rk4(ThieleParams(-1.0, -4.0, 2), 0.5, 2.0, 1e-4)
        assert s == pytest.approx(1 / math.sqrt(8 * math.exp(4) - 4), rel=1e-10)

    def test_fixed_point(self):
        assert evolve_rk4(ThieleParams(5.0, 3.0, 1.3), 0.0, 1.0, 1e-3) == 0.0

    def test_divergence_guard(self):
        with pytest.raises(BlowUpError) as info:
            evolve_rk4(ThieleParams(1.0, 1.0, 2), 1.0, 1.0, 1e-5)
        assert info.value.t_star == pytest.approx(math.log(2) / 2, abs=1e-4)

    @pytest.mark.parametrize("step", [0.0, -1e-3, 2.0, math.nan])
    def test_bad_step(self, step):
        with pytest.raises(InvalidParameterError):
            evolve_rk4(ThieleParams(1, -1, 2), 0.1, 1.0, step)

    def test_non_integer_exponent(self):
        p = ThieleParams(2.0, -3.0, 1.7)
        assert evolve_rk4(p, 0.2, 3.0, 1e-4) == pytest.approx(evolve_closed_form(p, 0.2, 3.0), rel=1e-9)

    def test_grid_matches_scalar(self):
        p = ThieleParams(1.0, -4.0, 2)
        grid = rk4_grid([1.0], [-4.0], [2.0], [0.1], [1.0], step_divisor=1e4)
        assert grid[0] == evolve_rk4(p, 0.1, 1.0, 1e-4)


class TestTrace:
    def test_single_point(self):
        assert trace(ThieleParams(1, -4, 2), 0.1, [0.0]) == [0.1]

    def test_two_points(self):
        s = trace(ThieleParams(1, -4, 2), 0.1, [0.0, 1.0])
        assert s[0] == 0.1
        assert s[1] == pytest.approx(RK4_ORACLE_S1, rel=1e-12)

    def test_chained_equals_direct(self):
        p = ThieleParams(1, -4, 2)
        chained = evolve_closed_form(p, evolve_closed_form(p, 0.1, 0.4), 0.6)
        assert chained == pytest.approx(trace(p, 0.1, [0.0, 1.0])[1], rel=1e-12)

    def test_blow_up_index(self):
        with pytest.raises(BlowUpError) as info:
            trace(ThieleParams(1, 1, 2), 1.0, [0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
        assert info.value.index == 4

    def test_grid_must_be_monotone(self):
        with pytest.raises(InvalidParameterError):
            trace(ThieleParams(1, -1, 2), 0.1, [0.0, 0.2, 0.1])
        with pytest.raises(InvalidParameterError):
            trace(ThieleParams(1, -1, 2), 0.1, [-0.1, 0.2])


# ---------------------------------------------------------------------------
# properties

rates = st.floats(1e6, 1e9)
exponents = st.floats(0.5, 4)
orbits = st.floats(1e-4, 2.0)
times = st.floats(1e-10, 1e-6)


@settings(max_examples=300)
@given(a=st.floats(-1e9, 1e9), b=st.floats(-1e9, -1e6), n=exponents, s0=orbits, t1=times, t2=times)
def test_semigroup(a, b, n, s0, t1, t2):
    p = ThieleParams(a, b, n)
    direct = evolve_closed_form(p, s0, t1 + t2)
    chained = evolve_closed_form(p, evolve_closed_form(p, s0, t1), t2)
    assume(direct > 1e-250)
    assert chained == pytest.approx(direct, rel=1e-12)


@given(a=rates, b=rates, n=exponents, s0=orbits)
def test_attractor_convergence(a, b, n, s0):
    p = ThieleParams(a, -b, n)
    # the residual after T is ~exp(-40) * (s_inf/s0)**n, so the start may not
    # sit too deep inside the attractor
    assume((steady_state(p) / s0) ** n <= 1e6)
    T = 40 / (n * a)
    s_inf = steady_state(p)
    assert abs(evolve_closed_form(p, s0, T) - s_inf) <= 1e-9 * max(1.0, s_inf)


@given(a=rates, b=rates, n=exponents, s0=orbits)
def test_monotone_approach(a, b, n, s0):
    p = ThieleParams(a, -b, n)
    s_inf = steady_state(p)
    assume(abs(s0 - s_inf) > 1e-6 * s_inf)
    s = np.array(trace(p, s0, np.linspace(0, 10 / (n * a), 50)))
    steps = np.diff(s)
    # strict until the orbit is within rounding of the attractor
    moving = np.abs(s[1:] - s_inf) > 1e-13 * s_inf
    if s0 < s_inf:
        assert np.all(steps[moving] > 0)
    else:
        assert np.all(steps[moving] < 0)


@given(a=st.floats(-1e9, 1e9), b=st.floats(-1e9, 0), n=exponents, s0=orbits, dt=times,
       k=st.sampled_from([0.5, 2.0, 4.0, 0.25, 8.0]))
def test_time_scale_covariance(a, b, n, s0, dt, k):
    # k is a power of two, so k*alpha and dt/k are exact
    lhs = evolve_closed_form(ThieleParams(a, b, n), s0, dt)
    rhs = evolve_closed_form(ThieleParams(k * a, k * b, n), s0, dt / k)
    assert lhs == rhs


@given(b=st.floats(-1e9, 1e9).filter(lambda v: abs(v) > 1e3), n=exponents, s0=orbits,
       dt=times, sign=st.sampled_from([-1.0, 1.0]))
def test_alpha_limit_continuity(b, n, s0, dt, sign):
    eps = max(EPS_ALPHA_FLOOR, min(EPS_ALPHA_REL * abs(b) * s0**n, EPS_ALPHA_HORIZON / (n * dt)))
    assume(1 - n * b * s0**n * dt > 0.05)
    alpha = sign * eps * (1 + 1e-12)  # just inside the general branch
    try:
        general = evolve_closed_form(ThieleParams(alpha, b, n), s0, dt)
    except BlowUpError:
        return
    assert general == pytest.approx(limit_formula(b, n, s0, dt), rel=1e-6)


def test_blow_up_time_by_bisection():
    """t* from the closed form equals the root of the literal radicand."""
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if bernoulli_radicand(1.0, 1.0, 2, 1.0, mid) > 0:
            lo = mid
        else:
            hi = mid
    assert blow_up_time(ThieleParams(1, 1, 2), 1.0) == pytest.approx(lo, abs=1e-12)
