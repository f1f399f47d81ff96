import numpy as np
import pytest
from scipy.signal import dlsim

from zfphase.errors import DomainError, ValidationError
from zfphase.lti import TransferFunction, freq_response
from zfphase.lure_sim import (PiecewiseLinearNonlinearity as PWL, SimConfig, constant_until,
                              detect_period, find_flat_cycle, find_periodic_kick, pulse,
                              simulate, tf_to_ss)

PLANT = TransferFunction.discrete([1, 0], [1, -1.8, 0.81])


def ss_response(ss, s):
    return ss.C @ np.linalg.solve(s * np.eye(len(ss.B)) - ss.A, ss.B) + ss.D


@pytest.mark.parametrize('tf', [
    TransferFunction.continuous([1, 0, 0], np.polymul([1, 0.5, 1], [1, 0.5, 1])),
    TransferFunction.continuous([3.0], [1, 2.0]),
    PLANT,
])
def test_realization_matches_transfer_function(tf):
    ss = tf_to_ss(tf)
    w = np.array([0.013, 0.3, 1.1, 2.9])
    s = np.exp(1j * w) if tf.is_discrete else 1j * w
    got = np.array([ss_response(ss, si) for si in s])
    assert np.allclose(got, freq_response(tf, w), rtol=1e-10)


def test_nonlinearity_shapes():
    sat = PWL.saturation(2.0, 0.5)
    assert sat(0.25) == 0.5 and sat(3.0) == 1.0 and sat(-3.0) == -1.0
    assert sat.is_odd() and sat.is_slope_restricted(2.0) and not sat.is_slope_restricted(1.9)
    osh = PWL.oshea_asymmetric(1000)
    assert osh(-0.5) == -500 and osh(-7) == -1000 and osh(3) == 0
    assert not osh.is_odd()
    dz = PWL.deadzone_saturation(1.3666, 0.1, 0.5, 0.5)
    assert dz(0.05) == 0 and dz(10) == 0.5 and dz(-10) == -0.5
    assert np.isclose(dz.max_slope, 1.3666)
    assert PWL.from_dict(dz.to_dict())(0.3) == dz(0.3)
    with pytest.raises(ValidationError):
        PWL([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValidationError):
        PWL.from_dict({'kind': 'cubic'})


def test_zero_input_gives_zero_output():
    tf = TransferFunction.continuous([1], [1, 2, 1])
    res = simulate(tf, PWL.saturation(5.0), SimConfig(1.0, step=1e-2))
    assert np.all(res.v == 0) and res.settled and not res.diverged
    res = simulate(PLANT, PWL.saturation(2.1), SimConfig(200))
    assert np.all(res.v == 0)


def test_linear_discrete_loop_matches_closed_loop():
    # with N(v) = k v and no saturation the loop is G / (1 + k G) driven by g
    k = 0.5
    nl = PWL([0.0], [0.0], k, k)
    res = simulate(PLANT, nl, SimConfig(100, g=pulse(1.0, 1)))
    den = np.polyadd(PLANT.den, k * np.r_[0.0, PLANT.num])
    u = np.zeros(101)
    u[0] = 1.0
    _, y = dlsim((PLANT.num, den, 1), u)
    assert np.allclose(res.v, y[:, 0], atol=1e-12)


def test_discrete_recursion_is_exact():
    nl = PWL.saturation(2.1)
    res = simulate(PLANT, nl, SimConfig(400, g=pulse(10.0, 1)))
    mid = simulate(PLANT, nl, SimConfig(200, g=pulse(10.0, 1)))
    tail = simulate(PLANT, nl, SimConfig(200, x0=mid.x_final))
    assert np.array_equal(tail.v, res.v[200:])


def test_rk4_linear_decay():
    # saturation never engages: exponential decay of the linear loop
    tf = TransferFunction.continuous([1.0], [1, 1.0])
    nl = PWL([0.0], [0.0], 1.0, 1.0)
    res = simulate(tf, nl, SimConfig(2.0, step=1e-2, x0=[1.0]))
    assert np.allclose(res.v, np.exp(-2 * res.t), rtol=1e-8)


def test_simulate_rejects_bad_setups():
    with pytest.raises(DomainError):
        simulate(TransferFunction.discrete([1], [1, -1.1]), PWL.saturation(1.0), SimConfig(10))
    with pytest.raises(ValidationError):
        simulate(TransferFunction.continuous([1, 0], [1, 1]), PWL.saturation(1.0),
                 SimConfig(1.0))
    with pytest.raises(ValidationError):
        simulate(PLANT, PWL([0.0], [0.0], -1.0, -1.0), SimConfig(10))
    with pytest.raises(ValidationError):
        SimConfig(0)


def test_divergence_flag():
    # slope beyond the Nyquist value with an unbounded linear nonlinearity
    nl = PWL([0.0], [0.0], 4.0, 4.0)
    res = simulate(PLANT, nl, SimConfig(2000, g=pulse(1.0, 1)))
    assert res.diverged and not res.settled and np.isnan(res.v[-1])


def test_detect_period():
    n = np.arange(1000)
    assert detect_period(0.9 ** n, 60) is None
    assert detect_period(np.ones(1000), 60) is None
    assert detect_period(np.sin(2 * np.pi * n / 7), 60) == 7
    assert detect_period(np.tile([1.0, -1.0, 0.5, 0.0], 250), 60) == 4
    assert detect_period(np.sin(n), 5) is None


def test_periodic_solution_at_2_1():
    found = find_periodic_kick(PLANT, PWL.saturation(2.1), amplitudes=np.arange(0.5, 5.01, 0.1))
    assert found is not None
    amp, width, res = found
    assert res.period is not None and not res.diverged
    assert PWL.saturation(2.1).is_slope_restricted(2.1)


def test_plain_impulse_kick_settles():
    res = simulate(PLANT, PWL.saturation(2.1), SimConfig(3000, g=pulse(10.0, 1)))
    assert res.settled and res.period is None


def test_flat_cycle_near_reference_slope():
    cyc = find_flat_cycle(PLANT, 1.3666)
    assert cyc is not None
    nl = cyc.nonlinearity()
    assert nl.is_slope_restricted(1.3666 + 0.01)
    assert cyc.result.period == cyc.period
    # every orbit sample sits on the flat piece named by the pattern
    pat = np.array(cyc.pattern)
    v = cyc.orbit
    assert np.all(v[pat == 1] >= cyc.delta + cyc.m2 / cyc.k - 1e-9)
    assert np.all(v[pat == -1] <= -cyc.delta - cyc.m1 / cyc.k + 1e-9)
    assert np.all(np.abs(v[pat == 0]) <= cyc.delta + 1e-9)


def test_no_flat_cycle_at_low_slope():
    assert find_flat_cycle(PLANT, 1.30) is None


def test_flat_cycle_needs_discrete():
    with pytest.raises(DomainError):
        find_flat_cycle(TransferFunction.continuous([1], [1, 1]), 2.0)


def oshea_run(tf, nl, step):
    return simulate(tf, nl, SimConfig(60.0, step=step, g=constant_until(100.0, 20.0)))


@pytest.fixture(scope='module')
def oshea_fig():
    from conftest import oshea
    return oshea(0.25), oshea_run(oshea(0.25), PWL.oshea_asymmetric(1000), 1e-4)


@pytest.mark.slow
def test_oshea_run_bounded_and_persistent(oshea_fig):
    _, res = oshea_fig
    assert not res.diverged and np.all(np.isfinite(res.v))
    assert np.max(np.abs(res.v)) < 1e12
    late = np.max(np.abs(res.v[res.t >= 40]))
    assert late > 0.1 * np.max(np.abs(res.v))


@pytest.mark.slow
def test_oshea_step_halving(oshea_fig):
    tf, res = oshea_fig
    half = oshea_run(tf, PWL.oshea_asymmetric(1000), 5e-5)
    p1, p2 = np.max(np.abs(res.v)), np.max(np.abs(half.v))
    assert abs(p1 - p2) < 0.01 * p1
