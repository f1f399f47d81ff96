import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zfphase.errors import ConstructionError, ValidationError
from zfphase.multipliers import (FirMultiplier, ImpulseMultiplier, MultiplierClass,
                                 klass, mult_response, multiplier_from_dict, require_class)


def test_impulse_example():
    m = ImpulseMultiplier([(-1.0, -0.9)])
    w = np.linspace(-5, 5, 101)
    assert np.allclose(mult_response(m, w), 1 + 0.9 * np.exp(1j * w))
    assert klass(m) is MultiplierClass.CLASS_ODD


def test_trivial_responses():
    w = np.linspace(0, np.pi, 11)
    assert np.allclose(mult_response(FirMultiplier(), w), 1.0)
    assert np.allclose(mult_response(ImpulseMultiplier(), w), 1.0)
    assert np.isclose(mult_response(FirMultiplier({1: 0.5}), [0.0])[0], 0.5)


def test_classes():
    assert klass(FirMultiplier({1: 0.9})) is MultiplierClass.CLASS_C_OR_D
    assert klass(FirMultiplier({0: 0.5})) is MultiplierClass.INVALID
    assert klass(FirMultiplier({1: 0.6, -3: 0.4})) is MultiplierClass.INVALID
    assert klass(FirMultiplier({1: 0.6, -3: -0.3})) is MultiplierClass.CLASS_ODD
    assert klass(ImpulseMultiplier([(1.0, 1.2)])) is MultiplierClass.INVALID
    with pytest.raises(ConstructionError):
        require_class(FirMultiplier({1: -0.5}), [MultiplierClass.CLASS_C_OR_D])


def test_fir_validation():
    with pytest.raises(ValidationError):
        FirMultiplier({1.5: 0.1})
    with pytest.raises(ValidationError):
        FirMultiplier({1: np.inf})


def test_json_round_trip():
    for m in (FirMultiplier({-8: 0.4, 9: 0.5}), ImpulseMultiplier([(-1.0, -0.9), (2.5, 0.05)])):
        assert multiplier_from_dict(m.to_dict()) == m
    with pytest.raises(ValidationError):
        multiplier_from_dict({'kind': 'iir', 'taps': []})
    with pytest.raises(ValidationError):
        multiplier_from_dict({'kind': 'fir', 'taps': [{'t': 1, 'h': 0.1}]})


taps = st.dictionaries(st.integers(-30, 30).filter(bool), st.floats(-1, 1), min_size=1,
                       max_size=8)


@settings(max_examples=100, deadline=None)
@given(taps, st.floats(0.01, 0.999))
def test_valid_multipliers_stay_in_right_half_plane(raw, scale):
    total = sum(abs(h) for h in raw.values())
    if total == 0:
        return
    m = FirMultiplier({n: scale * h / total for n, h in raw.items()})
    assert klass(m) is not MultiplierClass.INVALID
    w = np.linspace(0, 2 * np.pi, 400)
    resp = m.response(w)
    assert np.all(np.abs(resp - 1) <= m.l1 + 1e-12)
    assert np.all(resp.real > 0)
    assert np.all(np.abs(np.angle(resp, deg=True)) < 90)
