import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zfphase.errors import (DomainError, PoleOnBoundaryError, UndefinedPhaseError,
                            ValidationError)
from zfphase.lti import (Domain, TransferFunction, default_grid, freq_response,
                         frequency_grid, nyquist_value, phase_deg, positivity_check)
from zfphase.multipliers import FirMultiplier

from conftest import oshea


def test_example_plant_response_at_dc_and_nyquist(example_plant):
    g = freq_response(example_plant, [0.0, np.pi])
    assert np.isclose(g[0], 100.0 + 0j, rtol=1e-12)
    assert np.isclose(g[1], -1 / 3.61, rtol=1e-12)
    assert abs(g[1].imag) < 1e-12


def test_unit_gain():
    tf = TransferFunction.continuous([1], [1])
    assert np.allclose(freq_response(tf, [0.0, 1.0, 50.0]), 1.0)
    assert np.allclose(phase_deg(tf, [0.0, 1.0, 50.0]), 0.0)


def test_pure_delay_phase():
    tf = TransferFunction.discrete([1], [1, 0])
    assert np.isclose(phase_deg(tf, [np.pi / 2])[0], -90.0)


def test_pole_on_boundary():
    tf = TransferFunction.continuous([1], [1, 0, 1])
    with pytest.raises(PoleOnBoundaryError):
        freq_response(tf, [0.5, 1.0])
    with pytest.raises(PoleOnBoundaryError):
        freq_response(TransferFunction.discrete([1], [1, -1]), [0.0])


def test_undefined_phase():
    tf = TransferFunction.continuous([1, 0], [1, 1])
    with pytest.raises(UndefinedPhaseError):
        phase_deg(tf, [0.0, 1.0])


def test_oshea_phase_above_177_98(oshea_plant):
    ph = phase_deg(oshea_plant, np.linspace(0.02249, 0.03511, 500))
    assert np.all(ph > 177.98)


def test_nyquist_values(example_plant):
    assert np.isclose(nyquist_value(example_plant), 3.61, atol=1e-9)
    assert nyquist_value(TransferFunction.continuous([1], [1, 1])) == np.inf
    assert np.isclose(nyquist_value(TransferFunction.discrete([1], [1, 0])), 1.0)
    assert nyquist_value(TransferFunction.discrete([0], [1])) == np.inf


def test_nyquist_third_order_crossing():
    # 1/(s+1)^3 crosses the negative axis at w = sqrt(3) with G = -1/8
    tf = TransferFunction.continuous([1], [1, 3, 3, 1])
    assert np.isclose(nyquist_value(tf), 8.0, rtol=1e-8)


def test_nyquist_rejects_unstable():
    with pytest.raises(DomainError):
        nyquist_value(TransferFunction.continuous([1], [1, -1]))
    with pytest.raises(DomainError):
        nyquist_value(TransferFunction.discrete([1], [1, -1.0]))


def test_stability_margin():
    assert TransferFunction.continuous([1], [1, 1]).is_stable()
    assert not TransferFunction.continuous([1], [1, 0, 1]).is_stable()
    assert not TransferFunction.discrete([1], [1, -(1 - 1e-12)]).is_stable()
    assert TransferFunction.discrete([1], [1, -0.9]).is_stable()


def test_positivity_examples(example_plant):
    w = np.linspace(0, np.pi, 2001)
    assert positivity_check(np.ones_like(w), TransferFunction.discrete([1], [1, -0.5]), 1.0, w)
    assert not positivity_check(np.ones_like(w), example_plant, 3.7, w)
    m = FirMultiplier({1: 0.9})
    assert positivity_check(m, TransferFunction.discrete([0], [1]), 1.0, w)


def test_invalid_construction():
    with pytest.raises(ValidationError):
        TransferFunction.continuous([1], [0])
    with pytest.raises(ValidationError):
        TransferFunction.continuous([1], [1, np.nan])
    with pytest.raises(ValidationError):
        frequency_grid([0.0, 4.0], Domain.DISCRETE)
    with pytest.raises(ValidationError):
        frequency_grid([1.0, 0.5])
    with pytest.raises(ValidationError):
        frequency_grid([])


def test_json_round_trip(tmp_path, example_plant):
    path = tmp_path / 'p.json'
    path.write_text(json.dumps(example_plant.to_dict()))
    tf = TransferFunction.from_dict(json.loads(path.read_text()))
    assert tf.is_discrete and np.allclose(tf.den, [1, -1.8, 0.81])
    with pytest.raises(ValidationError):
        TransferFunction.from_dict({'domain': 'sideways', 'num': [1], 'den': [1]})
    with pytest.raises(ValidationError):
        TransferFunction.from_dict({'num': [1]})


def test_default_grid_covers_dynamics(oshea_plant):
    w = default_grid(oshea_plant, 101)
    assert w[0] == 0 and w[1] <= 1e-3 and w[-1] >= 1e3


coeff = st.floats(-3, 3, allow_nan=False).filter(lambda c: abs(c) > 1e-3)


@settings(max_examples=50, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=3), st.floats(0.1, 5.0))
def test_conjugate_symmetry(num, pole):
    tf = TransferFunction.continuous(num, np.poly([-pole, -pole - 1, -pole - 2]))
    w = np.linspace(0.01, 20, 50)
    assert np.allclose(freq_response(tf, -w), np.conj(freq_response(tf, w)))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 20.0))
def test_nyquist_scaling(alpha):
    tf = TransferFunction.continuous([1], [1, 3, 3, 1])
    assert np.isclose(nyquist_value(tf.scaled(alpha)), nyquist_value(tf) / alpha, rtol=1e-8)


def test_phase_unwrapping_is_continuous():
    tf = oshea(0.05)
    ph = phase_deg(tf, np.geomspace(1e-2, 1e2, 3000))
    assert np.max(np.abs(np.diff(ph))) < 180
