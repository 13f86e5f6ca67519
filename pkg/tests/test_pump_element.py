"""
Tests for the signal/idler linearization
"""
import math

import numpy as np
import pytest

from ki_paramp.errors import (
    DegenerateInverterError,
    NoGainError,
    OscillationPoleError,
    SingularNetworkError,
)
from ki_paramp.models import ModulatedInductor, SignalIdlerPair, TransmissionLineSegment
from ki_paramp.pump_element import (
    amplification_inverter,
    effective_admittance,
    idler_admittance,
    ladder_admittance,
    negative_resistance,
    signal_idler_impedance_matrix,
)

F0 = 2 * math.pi * 8e9


def test_impedance_matrix_entries():
    ind = ModulatedInductor(l0=1e-9, delta_l=0.2e-9 * np.exp(0.3j))
    pair = SignalIdlerPair.from_pump(F0 * 0.9, 2 * F0)
    z = signal_idler_impedance_matrix(ind, pair)
    assert z[0, 0] == pytest.approx(1j * pair.omega_s * 1e-9)
    assert z[1, 1] == pytest.approx(-1j * pair.omega_i * 1e-9)
    assert z[0, 1] == pytest.approx(1j * pair.omega_s * ind.delta_l / 2)
    assert z[1, 0] == pytest.approx(-1j * pair.omega_i * np.conj(ind.delta_l) / 2)


def test_inverter_carries_modulation_strength():
    ind = ModulatedInductor(l0=1e-9, delta_l=0.2e-9j)
    pair = SignalIdlerPair.from_pump(F0, 2 * F0)
    inverter = amplification_inverter(ind, pair)
    assert abs(inverter.j_s) * pair.omega_s * ind.l0_prime == pytest.approx(math.sqrt(ind.alpha))
    assert np.angle(inverter.j_s) == pytest.approx(math.pi / 2)


def test_inverter_needs_pump():
    with pytest.raises(DegenerateInverterError):
        amplification_inverter(ModulatedInductor(l0=1e-9), SignalIdlerPair.from_pump(F0, 2 * F0))


def test_unpumped_inductor_is_plain_reactance():
    ind = ModulatedInductor(l0=1e-9)
    pair = SignalIdlerPair.from_pump(0.95 * F0, 2 * F0)
    y = effective_admittance(ind, pair, 0.02 + 0.01j)
    assert y == pytest.approx(1.0 / (1j * pair.omega_s * 1e-9), rel=1e-12)


def test_passive_idler_gives_negative_conductance():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        l0 = rng.uniform(0.2e-9, 5e-9)
        alpha = rng.uniform(1e-4, 0.5)
        ind = ModulatedInductor(l0=l0, delta_l=2 * l0 * math.sqrt(alpha) * np.exp(1j * rng.uniform(0, 6)))
        omega_p = rng.uniform(1.5, 2.5) * F0
        pair = SignalIdlerPair.from_pump(rng.uniform(0.3, 0.7) * omega_p, omega_p)
        y_idler = complex(rng.uniform(1e-4, 0.1), rng.uniform(-0.1, 0.0))
        assert effective_admittance(ind, pair, y_idler).real <= 0


def test_oscillation_pole_raises():
    ind = ModulatedInductor(l0=2.0 ** -33)
    pair = SignalIdlerPair.from_pump(2.0 ** 33, 2.0 ** 34)
    with pytest.raises(OscillationPoleError):
        effective_admittance(ind, pair, 1j)


def test_array_evaluation_matches_scalar():
    ind = ModulatedInductor(l0=1e-9, delta_l=0.1e-9)
    omega_s = np.linspace(0.9, 1.1, 5) * F0
    pair = SignalIdlerPair.from_pump(omega_s, 2 * F0)
    y_idler = np.full(5, 0.02 - 0.005j)
    y = effective_admittance(ind, pair, y_idler)
    for k, w in enumerate(omega_s):
        single = effective_admittance(ind, SignalIdlerPair.from_pump(w, 2 * F0), y_idler[k])
        assert y[k] == pytest.approx(single, rel=1e-12)


def test_negative_resistance():
    assert negative_resistance(-0.01 + 0.3j) == pytest.approx(100.0)
    with pytest.raises(NoGainError):
        negative_resistance(0.01)


class TestLadder:
    """Node admittance of capacitor plus line ladder"""

    def test_bare_node(self):
        y = ladder_admittance([], 1e-12, 50.0, F0)
        assert y == pytest.approx(1j * F0 * 1e-12 + 0.02)

    def test_shorted_node_raises(self):
        with pytest.raises(SingularNetworkError):
            ladder_admittance([], 1e-12, 0.0, F0)

    def test_array_frequencies(self):
        line = TransmissionLineSegment(z_c=50.0, length_fraction=0.3, f_ref=F0)
        omega = np.linspace(0.8, 1.2, 9) * F0
        y = ladder_admittance([line], 0.0, 50.0, omega)
        np.testing.assert_allclose(y, 0.02, rtol=1e-12)


def test_idler_admittance_is_passive(reference_design, standing_wave_env):
    omega_i = np.linspace(0.8, 1.2, 401) * reference_design.f0
    for env in (None, standing_wave_env):
        y = idler_admittance(reference_design, env, omega_i)
        assert np.all(y.real > 0)


def test_inverter_example_value():
    l0 = 1e-9 / 0.99
    ind = ModulatedInductor(l0=l0, delta_l=0.2 * l0)
    omega = 2 * math.pi * 8e9
    inverter = amplification_inverter(ind, SignalIdlerPair.from_pump(omega, 2 * omega))
    assert abs(inverter.j_s) == pytest.approx(0.1 / (omega * 1e-9), rel=1e-9)
    assert abs(inverter.j_s) == pytest.approx(2.0e-3, rel=0.01)


def test_effective_conductance_example_value():
    l0 = 1e-9 / 0.99
    ind = ModulatedInductor(l0=l0, delta_l=0.2 * l0)
    omega = 2 * math.pi * 8e9
    y_eff = effective_admittance(ind, SignalIdlerPair.from_pump(omega, 2 * omega), 1 / 50)
    x = omega * ind.l0_prime / 50
    assert y_eff.real == pytest.approx(-0.01 * x / (omega * ind.l0_prime * (1 + x ** 2)), rel=1e-9)
    assert y_eff.real == pytest.approx(-9.95e-5, rel=1e-3)
    assert negative_resistance(y_eff) == pytest.approx(1.0e4, rel=0.01)
