import math

import pytest
from hypothesis import given, strategies as st

from mollow.errors import ValidationError
from mollow.units import (HBAR, KB, EmitterParams, UNITS, rabi_from_power,
                          thermal_energy, thermal_rate, to_angular_frequency,
                          to_energy)


def test_constants():
    assert UNITS.hbar == 658.2119569
    assert UNITS.kB == 86.17333262
    with pytest.raises(Exception):
        UNITS.hbar = 1.0


@pytest.mark.parametrize("E, expected", [
    (0.0, 0.0),
    (658.2119569, 1.0),
    (430.8666631, 0.654601695674544194838),  # mpmath, 30 digits
])
def test_to_angular_frequency(E, expected):
    assert to_angular_frequency(E) == pytest.approx(expected, rel=1e-14, abs=0)


@pytest.mark.parametrize("T, expected", [(0, 0.0), (10, 861.7333262), (5, 430.8666631)])
def test_thermal_energy(T, expected):
    assert thermal_energy(T) == pytest.approx(expected, rel=1e-15)


def test_thermal_energy_rejects_negative():
    with pytest.raises(ValidationError):
        thermal_energy(-1.0)


@pytest.mark.parametrize("P, expected", [(0, 0.0), (1, 5.04), (4, 10.08)])
def test_rabi_from_power(P, expected):
    assert rabi_from_power(P, 5.04) == pytest.approx(expected, rel=1e-15)
    assert rabi_from_power(P, -5.04) == pytest.approx(expected, rel=1e-15)


def test_rabi_from_power_rejects_negative():
    with pytest.raises(ValidationError):
        rabi_from_power(-0.1, 5.04)


# physical ranges (uW), so c^2 P never underflows
@given(st.one_of(st.just(0.0), st.floats(1e-12, 1e6)),
       st.one_of(st.just(0.0), st.floats(1e-6, 100)), st.floats(-20, 20))
def test_rabi_power_scaling(P, c, kappa):
    assert rabi_from_power(c * c * P, kappa) == pytest.approx(
        c * rabi_from_power(P, kappa), rel=1e-12, abs=1e-300)


@given(st.floats(-1e9, 1e9))
def test_energy_round_trip(E):
    assert to_energy(to_angular_frequency(E)) == pytest.approx(E, rel=1e-12, abs=1e-300)


@given(st.floats(0, 1e4), st.floats(0, 1e4))
def test_thermal_rate_linear(T1, T2):
    assert thermal_rate(T1 + T2) == pytest.approx(thermal_rate(T1) + thermal_rate(T2),
                                                  rel=1e-12, abs=1e-300)
    assert thermal_rate(T1) == pytest.approx(KB * T1 / HBAR, rel=1e-15, abs=1e-300)


def test_emitter_params_validation():
    e = EmitterParams(561.0, 30.0, -5.04)
    assert e.gamma1 == pytest.approx(1 / 561.0)
    assert e.gamma0_rate == pytest.approx(30 / HBAR)
    for bad in ({"T1": 0}, {"T1": -1}, {"T1": 1, "gamma0": -1}, {"T1": 1, "kappa": math.nan}):
        with pytest.raises(ValidationError):
            EmitterParams(**bad)
