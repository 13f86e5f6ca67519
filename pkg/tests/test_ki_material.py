"""
Tests for kinetic-inductance laws, pump coefficients and curve fits
"""
import math

import numpy as np
import pytest

from ki_paramp.errors import (
    InsufficientDataError,
    SuperconductivityBreakdownError,
    ValidationError,
)
from ki_paramp.ki_material import (
    check_operating_point,
    external_linewidth,
    fit_ki_curve,
    frequency_shift,
    jj_alpha,
    jj_inductance,
    kinetic_inductance,
    load_ki_curve,
    participation_ratio,
    pump_coefficients,
    stepped_filter_qe,
    total_inductance,
    xi3_upper_bound,
)
from ki_paramp.materials import LAWS, law_for
from ki_paramp.models import KineticInductorModel, ModelKind, PumpOperatingPoint

OMEGA0 = 2 * math.pi * 8.6e9


def parabolic(i_star2=3.25e-3, **kwargs):
    return KineticInductorModel(model_kind=ModelKind.PARABOLIC, l_k0=1e-9, i_star2=i_star2, **kwargs)


class TestInductanceLaws:
    """Current dependence of the three laws"""

    def test_registry_covers_every_kind(self):
        assert set(LAWS) == set(ModelKind)
        assert law_for("clem").kind is ModelKind.CLEM

    def test_parabolic_doubles_at_scale_current(self):
        assert kinetic_inductance(parabolic(), 3.25e-3) == pytest.approx(2e-9)

    def test_geometric_term_is_added(self):
        model = parabolic(l_geo=0.3e-9)
        assert total_inductance(model, 0.0) == pytest.approx(1.3e-9)
        assert participation_ratio(model) == pytest.approx(1.0 / 1.3)

    def test_quartic_adds_fourth_order(self):
        model = KineticInductorModel(model_kind=ModelKind.QUARTIC, l_k0=1e-9, i_star2=2e-3,
                                     i_star4=1e-3)
        assert kinetic_inductance(model, 1e-3) == pytest.approx(1e-9 * (1 + 0.25 + 1.0))

    def test_clem_matches_parabolic_at_small_current(self):
        i_star_star = 4e-3
        clem = KineticInductorModel(model_kind=ModelKind.CLEM, l_k0=1e-9,
                                    i_star_star=i_star_star, n_exp=2.0)
        quad = parabolic(i_star2=i_star_star * math.sqrt(2.0))
        for x in np.linspace(0.02, 0.1, 9):
            current = x * i_star_star
            diff = kinetic_inductance(clem, current) - kinetic_inductance(quad, current)
            assert 0.375 <= diff / (1e-9 * x ** 4) <= 0.38

    def test_quartic_worked_example(self):
        model = KineticInductorModel(model_kind=ModelKind.QUARTIC, l_k0=1e-9, i_star2=3.25e-3,
                                     i_star4=1.7e-3)
        expected = 1e-9 * (1 + (1.0 / 3.25) ** 2 + (1.0 / 1.7) ** 4)
        assert kinetic_inductance(model, 1.0e-3) == pytest.approx(expected, rel=1e-12)
        assert kinetic_inductance(model, 1.0e-3) == pytest.approx(1.2144e-9, rel=1e-4)

    def test_clem_worked_example(self):
        clem = KineticInductorModel(model_kind=ModelKind.CLEM, l_k0=1e-9, i_star_star=1.65e-3,
                                    n_exp=2.21)
        assert kinetic_inductance(clem, 1.15e-3) == pytest.approx(1.311e-9, rel=1e-3)
        with pytest.raises(SuperconductivityBreakdownError):
            kinetic_inductance(clem, 1.65e-3)

    def test_clem_breaks_down_at_depairing_current(self):
        clem = KineticInductorModel(model_kind=ModelKind.CLEM, l_k0=1e-9, i_star_star=4e-3)
        with pytest.raises(SuperconductivityBreakdownError):
            kinetic_inductance(clem, 4e-3)

    def test_model_validation(self):
        with pytest.raises(ValidationError):
            KineticInductorModel(model_kind=ModelKind.QUARTIC, l_k0=1e-9, i_star2=1e-3)
        with pytest.raises(ValidationError):
            KineticInductorModel(model_kind=ModelKind.CLEM, l_k0=1e-9)
        with pytest.raises(ValidationError):
            parabolic(i_c=5e-3)


class TestPumpCoefficients:
    """Three-wave coefficients of the biased inductor"""

    def test_modulation_is_consistent(self):
        model = parabolic()
        op = PumpOperatingPoint(i_dc=1e-3, i_p_mag=1e-4, omega_p=2 * OMEGA0)
        coeffs = pump_coefficients(model, op, OMEGA0)
        ratio = 1e-3 * 1e-4 / (3.25e-3 ** 2 + 1e-3 ** 2)
        assert coeffs.alpha == pytest.approx(9.0 / 16.0 * ratio ** 2)
        assert coeffs.alpha == pytest.approx(abs(coeffs.delta_l) ** 2 / (4 * coeffs.l_i ** 2))
        assert coeffs.xi3 == pytest.approx(-1.5 * ratio * OMEGA0)

    def test_pump_phase_is_conjugated(self):
        op = PumpOperatingPoint(i_dc=1e-3, i_p_mag=1e-4, omega_p=2 * OMEGA0, phi_p=0.4)
        coeffs = pump_coefficients(parabolic(), op, OMEGA0)
        assert np.angle(coeffs.delta_l) == pytest.approx(-0.4)

    def test_linear_inductor_has_no_mixing(self):
        model = KineticInductorModel(model_kind=ModelKind.PARABOLIC, l_k0=1e-9)
        op = PumpOperatingPoint(i_dc=1e-3, i_p_mag=1e-4, omega_p=2 * OMEGA0)
        coeffs = pump_coefficients(model, op, OMEGA0)
        assert coeffs.alpha == 0.0
        assert coeffs.xi3 == 0

    def test_unbiased_inductor_has_no_three_wave_term(self):
        op = PumpOperatingPoint(i_dc=0.0, i_p_mag=1e-4, omega_p=2 * OMEGA0)
        assert pump_coefficients(parabolic(), op, OMEGA0).alpha == 0.0

    def test_critical_current_is_enforced(self):
        model = parabolic(i_c=1e-3)
        op = PumpOperatingPoint(i_dc=0.8e-3, i_p_mag=0.2e-3, omega_p=2 * OMEGA0)
        with pytest.raises(SuperconductivityBreakdownError):
            check_operating_point(model, op)

    def test_operating_point_checks_its_own_critical_current(self):
        with pytest.raises(SuperconductivityBreakdownError):
            PumpOperatingPoint(i_dc=0.8e-3, i_p_mag=0.2e-3, omega_p=2 * OMEGA0, i_c=1e-3)
        with pytest.raises(ValidationError):
            PumpOperatingPoint(i_dc=0.1e-3, i_p_mag=0.1e-3, omega_p=2 * OMEGA0, i_c=0.0)
        op = PumpOperatingPoint(i_dc=0.7e-3, i_p_mag=0.2e-3, omega_p=2 * OMEGA0, i_c=1e-3)
        assert op.i_c == 1e-3

    @pytest.mark.parametrize("i_dc, i_p", [(0.3e-3, 0.05e-3), (0.6e-3, 0.2e-3), (1.1e-3, 0.4e-3)])
    def test_alpha_xi3_identity(self, i_dc, i_p):
        op = PumpOperatingPoint(i_dc=i_dc, i_p_mag=i_p, omega_p=2 * OMEGA0, phi_p=0.3)
        coeffs = pump_coefficients(parabolic(), op, OMEGA0)
        assert coeffs.alpha == pytest.approx(abs(coeffs.xi3) ** 2 / (4 * OMEGA0 ** 2), rel=1e-12)

    def test_xi3_is_linear_in_pump_current(self):
        single = pump_coefficients(parabolic(), PumpOperatingPoint(
            i_dc=0.6e-3, i_p_mag=0.1e-3, omega_p=2 * OMEGA0), OMEGA0)
        double = pump_coefficients(parabolic(), PumpOperatingPoint(
            i_dc=0.6e-3, i_p_mag=0.2e-3, omega_p=2 * OMEGA0), OMEGA0)
        assert abs(double.xi3) / abs(single.xi3) == pytest.approx(2.0, rel=1e-12)
        assert double.alpha / single.alpha == pytest.approx(4.0, rel=1e-12)

    def test_kerr_and_pump_shift_at_zero_bias(self):
        op = PumpOperatingPoint(i_dc=0.0, i_p_mag=0.1e-3, omega_p=2 * OMEGA0)
        coeffs = pump_coefficients(parabolic(), op, OMEGA0)
        assert coeffs.kerr / (2 * math.pi) == pytest.approx(-3.48, rel=1e-3)
        assert coeffs.pump_shift / (2 * math.pi) == pytest.approx(-12.21e6, rel=1e-3)

    def test_kerr_vanishes_at_eighth_root_bias(self):
        i_zero = 3.25e-3 / math.sqrt(8.0)
        at_zero = pump_coefficients(parabolic(), PumpOperatingPoint(
            i_dc=i_zero, i_p_mag=1e-5, omega_p=2 * OMEGA0), OMEGA0)
        below = pump_coefficients(parabolic(), PumpOperatingPoint(
            i_dc=0.9 * i_zero, i_p_mag=1e-5, omega_p=2 * OMEGA0), OMEGA0)
        above = pump_coefficients(parabolic(), PumpOperatingPoint(
            i_dc=1.1 * i_zero, i_p_mag=1e-5, omega_p=2 * OMEGA0), OMEGA0)
        assert at_zero.kerr == pytest.approx(0.0, abs=1e-9)
        assert at_zero.pump_shift == pytest.approx(0.0, abs=1e-3)
        assert below.kerr < 0 < above.kerr

    def test_kerr_is_tens_of_hertz_or_less(self):
        omega0 = 2 * math.pi * 8e9
        op = PumpOperatingPoint(i_dc=0.6e-3, i_p_mag=0.2e-3, omega_p=2 * omega0)
        coeffs = pump_coefficients(parabolic(), op, omega0)
        assert 1.0 < abs(coeffs.kerr) / (2 * math.pi) < 100.0


class TestXi3Ceiling:
    """Largest three-wave coefficient below the critical current"""

    def test_dimensionless_maximum(self):
        ceiling = xi3_upper_bound(1.0, 1.0)
        assert ceiling.dimensionless_max == pytest.approx(0.0629, abs=0.001)
        assert ceiling.optimal_ip_fraction == pytest.approx(0.52, abs=0.02)

    def test_scales_with_resonance_frequency(self):
        ceiling = xi3_upper_bound(1e-3, 2 * math.pi * 9.6e9)
        assert ceiling.max_xi3 / (2 * math.pi) == pytest.approx(0.6e9, rel=0.2)

    def test_rejects_non_positive_current(self):
        with pytest.raises(ValidationError):
            xi3_upper_bound(0.0, OMEGA0)


class TestBiasFilter:
    """Stepped-impedance filter and junction comparison helpers"""

    def test_external_q(self):
        q_e = stepped_filter_qe(5, 90.0, 35.0, 50.0, 60.0)
        assert q_e == pytest.approx(8269, abs=10)
        assert external_linewidth(q_e, OMEGA0) == pytest.approx(OMEGA0 / q_e)

    def test_external_q_validation(self):
        with pytest.raises(ValidationError):
            stepped_filter_qe(0, 90.0, 35.0, 50.0, 60.0)
        with pytest.raises(ValidationError):
            stepped_filter_qe(5, 90.0, -35.0, 50.0, 60.0)

    def test_junction_inductance(self):
        assert jj_inductance(1e-9, 0.0, 1e-6) == pytest.approx(1e-9)
        assert jj_inductance(1e-9, 0.6e-6, 1e-6) == pytest.approx(1e-9 / 0.8)
        with pytest.raises(SuperconductivityBreakdownError):
            jj_inductance(1e-9, 1e-6, 1e-6)

    def test_junction_alpha(self):
        assert jj_alpha(1.0, 1.0, 1.0) == pytest.approx(0.0625)


class TestFits:
    """Round trips through the frequency-shift fits"""

    currents = np.linspace(0.0, 1.5e-3, 16)

    def _curve(self, model):
        return np.column_stack([self.currents, frequency_shift(model, self.currents)])

    def test_parabolic_round_trip(self, ki_template):
        truth = KineticInductorModel(model_kind=ModelKind.PARABOLIC, l_k0=0.8e-9, l_geo=0.2e-9,
                                     i_star2=3.25e-3)
        result = fit_ki_curve(self._curve(truth), "parabolic", ki_template)
        assert result.model.i_star2 == pytest.approx(3.25e-3, rel=1e-3)
        assert result.residual_rms < 1e-9

    def test_quartic_round_trip(self, ki_template):
        truth = KineticInductorModel(model_kind=ModelKind.QUARTIC, l_k0=0.8e-9, l_geo=0.2e-9,
                                     i_star2=3.25e-3, i_star4=1.7e-3)
        result = fit_ki_curve(self._curve(truth), ModelKind.QUARTIC, ki_template)
        assert result.model.model_kind is ModelKind.QUARTIC
        assert result.model.i_star2 == pytest.approx(3.25e-3, rel=1e-3)
        assert result.model.i_star4 == pytest.approx(1.7e-3, rel=1e-3)

    def test_clem_round_trip(self, ki_template):
        truth = KineticInductorModel(model_kind=ModelKind.CLEM, l_k0=0.8e-9, l_geo=0.2e-9,
                                     i_star_star=5e-3, n_exp=2.21)
        currents = np.linspace(0.0, 4e-3, 16)
        data = np.column_stack([currents, frequency_shift(truth, currents)])
        result = fit_ki_curve(data, "clem", ki_template)
        assert result.model.i_star_star == pytest.approx(5e-3, rel=1e-3)

    def test_flat_curve_gives_unbounded_scale(self, ki_template):
        data = np.column_stack([self.currents, np.zeros_like(self.currents)])
        result = fit_ki_curve(data, "parabolic", ki_template)
        assert math.isinf(result.model.i_star2)
        assert result.nfev == 0

    def test_needs_four_points(self, ki_template):
        with pytest.raises(InsufficientDataError):
            fit_ki_curve([(0.0, 0.0), (1e-3, -1e-3), (2e-3, -4e-3)], "parabolic", ki_template)

    def test_needs_non_zero_current(self, ki_template):
        with pytest.raises(InsufficientDataError):
            fit_ki_curve([(0.0, 0.0)] * 5, "parabolic", ki_template)


class TestCurveFile:
    """Reading frequency-shift curves from disk"""

    def test_load(self, tmp_path):
        path = tmp_path / "curve.csv"
        path.write_text("i_dc_A,dfrac\n0.0,0.0\n0.001,-0.0004\n")
        data = load_ki_curve(path)
        assert data.shape == (2, 2)
        assert data[1, 1] == pytest.approx(-0.0004)

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "curve.csv"
        path.write_text("current,shift\n0.0,0.0\n")
        with pytest.raises(ValidationError):
            load_ki_curve(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_ki_curve(tmp_path / "absent.csv")


def test_xi3_example_value():
    model = parabolic()
    omega0 = 2 * math.pi * 8.4e9
    op = PumpOperatingPoint(i_dc=0.6e-3, i_p_mag=0.2e-3, omega_p=2 * omega0)
    assert abs(pump_coefficients(model, op, omega0).xi3) / (2 * math.pi) == pytest.approx(
        138e6, rel=0.01)


def test_single_section_filter():
    assert stepped_filter_qe(1, 90.0, 35.0, 50.0, 60.0) == pytest.approx(4.33, abs=0.01)
