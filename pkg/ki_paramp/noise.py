"""
Noise-cascade algebra, added-noise extraction and qubit power calibration
"""
import logging
import math
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import constants, optimize
from scipy.integrate import trapezoid

from .errors import (
    FitFailureError,
    InsufficientDataError,
    InvalidGainError,
    ValidationError,
)
from .models import NoiseChainModel, QubitCalibration, QubitFitResult

logger = logging.getLogger(__name__)

HBAR = constants.hbar
K_B = constants.k

NOISE_SPECTRA_HEADER = ("freq_hz", "p_on_dbm", "p_off_dbm")
NOISE_SPECTRA_GAIN_COLUMN = "g_s_db"
QUBIT_DATA_HEADER = ("detuning_hz", "p_vna_dbm", "re_s21", "im_s21")

# spectrum-analyzer resolution bandwidth used when converting power to quanta
DEFAULT_MEASUREMENT_BANDWIDTH = 10.0

QUBIT_FIT_TOLERANCE = 1e-12
QUBIT_FIT_MAX_EVALUATIONS = 2000
MIN_QUBIT_POWERS = 2
MIN_QUBIT_DETUNINGS = 5


class NoiseCascade(NamedTuple):
    n2: float
    n3: float
    n4: float


class NoiseSpectra(NamedTuple):
    freq_hz: np.ndarray
    p_on_w: np.ndarray
    p_off_w: np.ndarray
    g_s_db: Optional[np.ndarray] = None


class QubitData(NamedTuple):
    detuning: np.ndarray
    p_vna: np.ndarray
    s21: np.ndarray


# ---------------------------------------------------------------- conversions

def dbm_to_watts(p_dbm):
    return 1e-3 * np.power(10.0, np.asarray(p_dbm, dtype=float) / 10.0)


def db_to_ratio(value_db):
    return np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)


def ratio_to_db(ratio):
    return 10.0 * np.log10(ratio)


def power_to_quanta(p_w, omega, b_m: float = DEFAULT_MEASUREMENT_BANDWIDTH):
    """Noise power in a measurement bandwidth expressed as photon quanta, P / (hbar omega B_m)"""
    if not b_m > 0:
        raise ValidationError("measurement bandwidth must be positive")
    return np.asarray(p_w, dtype=float) / (HBAR * np.asarray(omega, dtype=float) * b_m)


# ---------------------------------------------------------------- cascade

def cascade_forward(chain: NoiseChainModel, n_a: float) -> NoiseCascade:
    """
    Noise quanta at the PA output, after the inter-stage loss, and at the receiver

    Args:
        chain: measurement cascade
        n_a: added noise of the pumped PA, input-referred

    Returns:
        NoiseCascade(n2, n3, n4)
    """
    n2 = chain.g_s * (chain.n1 + n_a)
    n3 = chain.a_23 * n2 + (1.0 - chain.a_23) * chain.n_t23
    n4 = chain.g_sys * (n3 + chain.n_sys)
    return NoiseCascade(n2=n2, n3=n3, n4=n4)


def cascade_pump_off(chain: NoiseChainModel) -> NoiseCascade:
    """Same cascade with the PA unpumped; it reflects the input noise n1 unchanged"""
    n2 = chain.n1
    n3 = chain.a_23 * n2 + (1.0 - chain.a_23) * chain.n_t23
    n4 = chain.g_sys * (n3 + chain.n_sys)
    return NoiseCascade(n2=n2, n3=n3, n4=n4)


def added_noise(n4, n4_off, g_s, g_sys_eff, n1: float = 0.5):
    """
    Input-referred added noise from pump-on and pump-off receiver noise

    g_sys_eff is a_23 * g_sys. Works elementwise on arrays.

    Raises:
        InvalidGainError: if any g_s is not above unity
    """
    g_s_arr = np.asarray(g_s, dtype=float)
    if np.any(g_s_arr <= 1.0):
        raise InvalidGainError("signal gain g_s must exceed 1 to refer noise to the input")
    if np.any(np.asarray(g_sys_eff, dtype=float) <= 0):
        raise ValidationError("g_sys_eff must be positive")
    n_a = (np.asarray(n4) - np.asarray(n4_off)) / (g_s_arr * g_sys_eff) + n1 / g_s_arr - n1
    return float(n_a) if np.ndim(n_a) == 0 else n_a


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose occupation 1 / (exp(hbar omega / k_B T) - 1); zero at T = 0"""
    if temperature < 0:
        raise ValidationError("temperature must be non-negative")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega / (K_B * temperature))


def input_occupation(omega: float, temperature: float) -> float:
    """Symmetrized input noise 0.5 coth(hbar omega / 2 k_B T), which n1 approximates as 0.5"""
    return thermal_occupation(omega, temperature) + 0.5


def excess_noise(q_e: float, q_i: float, g_s: float, temperature: float, omega: float) -> float:
    """
    Extra added noise from internal loss of the nonlinear resonator

    Args:
        q_e: external quality factor
        q_i: internal quality factor
        g_s: signal power gain
        temperature: bath temperature in kelvin
        omega: signal angular frequency

    Returns:
        Excess noise in quanta
    """
    if not q_i > 0:
        raise ValidationError("q_i must be positive")
    if q_e < 0:
        raise ValidationError("q_e must be non-negative")
    if not g_s > 1:
        raise InvalidGainError("signal gain g_s must exceed 1")
    n_th = thermal_occupation(omega, temperature)
    gain_factor = (math.sqrt(g_s) + 1.0) ** 2 / (g_s - 1.0)
    return q_e / (2.0 * q_i) * gain_factor * (2.0 * n_th + 1.0) + n_th


def snr_gain(p_n4, p_n4_off, g_s):
    """SNR improvement g_s * P_off / P_on from the rise of the noise floor"""
    p_n4 = np.asarray(p_n4, dtype=float)
    p_n4_off = np.asarray(p_n4_off, dtype=float)
    if np.any(p_n4 <= 0) or np.any(p_n4_off <= 0):
        raise ValidationError("noise powers must be positive")
    ratio = np.asarray(g_s) * p_n4_off / p_n4
    return float(ratio) if np.ndim(ratio) == 0 else ratio


def system_noise_temperature(n4_off, omega, g_sys_eff):
    """Input-referred noise temperature of the chain with the PA off"""
    if np.any(np.asarray(g_sys_eff) <= 0) or np.any(np.asarray(omega) <= 0):
        raise ValidationError("omega and g_sys_eff must be positive")
    t_sys = np.asarray(n4_off) * HBAR * np.asarray(omega) / (K_B * np.asarray(g_sys_eff))
    return float(t_sys) if np.ndim(t_sys) == 0 else t_sys


def noise_spectra_table(spectra: NoiseSpectra, g_sys_eff: float, g_s: Optional[float] = None,
                        n1: float = 0.5,
                        b_m: float = DEFAULT_MEASUREMENT_BANDWIDTH) -> List[Dict[str, float]]:
    """
    Per-frequency added noise, SNR gain and system temperature of measured spectra

    Args:
        spectra: pump-on and pump-off receiver noise powers
        g_sys_eff: calibrated gain from the PA output to the receiver
        g_s: PA power gain; used where the spectra carry no g_s_db column
        n1: input noise quanta
        b_m: measurement bandwidth in Hz

    Returns:
        rows with freq_hz, n_a, g_snr_db, t_sys_k
    """
    if spectra.g_s_db is not None:
        g_s = db_to_ratio(spectra.g_s_db)
    elif g_s is not None:
        g_s = np.full(len(spectra.freq_hz), float(g_s))
    else:
        raise ValidationError("noise.g_s is required when the spectra carry no g_s_db column")

    omega = 2.0 * math.pi * spectra.freq_hz
    n4 = power_to_quanta(spectra.p_on_w, omega, b_m)
    n4_off = power_to_quanta(spectra.p_off_w, omega, b_m)
    n_a = added_noise(n4, n4_off, g_s, g_sys_eff, n1)
    g_snr = snr_gain(spectra.p_on_w, spectra.p_off_w, g_s)
    t_sys = system_noise_temperature(n4_off, omega, g_sys_eff)

    logger.info("Reduced %d noise-spectrum points: N_A %.3g..%.3g quanta",
                len(omega), float(np.min(n_a)), float(np.max(n_a)))
    return [
        {"freq_hz": float(f), "n_a": float(n), "g_snr_db": float(ratio_to_db(g)),
         "t_sys_k": float(t)}
        for f, n, g, t in zip(spectra.freq_hz, np.atleast_1d(n_a), np.atleast_1d(g_snr),
                              np.atleast_1d(t_sys))
    ]


# ---------------------------------------------------------------- qubit calibration

def qubit_s21(cal: QubitCalibration, detuning, omega_d):
    """
    Steady-state transmission past a transmon driven at detuning and strength omega_d

    Broadcasts over array detunings and drive strengths.
    """
    gamma1 = cal.gamma1
    gamma2 = cal.gamma2
    x = np.asarray(detuning, dtype=float) / gamma2
    saturation = np.asarray(omega_d, dtype=float) ** 2 / (gamma1 * gamma2)
    s21 = 1.0 - (cal.gamma1e / (2.0 * gamma2)) * (1.0 + 1j * x) / (1.0 + x ** 2 + saturation)
    return complex(s21) if np.ndim(s21) == 0 else s21


def drive_strength(gamma1e: float, p_d: float, omega_q: float) -> float:
    """Rabi rate sqrt(2 gamma1e p_d / hbar omega_q) of a drive power p_d at the qubit"""
    if not gamma1e > 0 or not omega_q > 0:
        raise ValidationError("gamma1e and omega_q must be positive")
    if p_d < 0:
        raise ValidationError("drive power must be non-negative")
    return math.sqrt(2.0 * gamma1e * p_d / (HBAR * omega_q))


def photon_flux(omega_d: float, gamma1: float) -> float:
    """Photons per second reaching the qubit, omega_d^2 / (2 gamma1)"""
    if not gamma1 > 0:
        raise ValidationError("gamma1 must be positive")
    return omega_d ** 2 / (2.0 * gamma1)


def _initial_rates(detuning: np.ndarray, p_vna: np.ndarray, s21: np.ndarray,
                   p_ref: float) -> Tuple[float, float, float]:
    lowest = p_vna == np.min(p_vna)
    order = np.argsort(detuning[lowest])
    d_low = detuning[lowest][order]
    dip = np.real(1.0 - s21[lowest][order])
    peak = float(np.max(dip))

    # Lorentzian area pi * gamma2 * peak
    gamma2 = max(trapezoid(np.clip(dip, 0.0, None), d_low) / (math.pi * peak),
                 float(np.min(np.diff(d_low))) if len(d_low) > 1 else 1.0)
    depth = min(peak, 0.999)
    gamma1 = 2.0 * depth * gamma2
    gamma_phi = max(gamma2 * (1.0 - depth), 1e-3 * gamma2)

    at_ref = np.isclose(p_vna, p_ref)
    if np.any(at_ref):
        ref_peak = float(np.max(np.real(1.0 - s21[at_ref])))
    else:
        ref_peak = peak
    ratio = peak / ref_peak - 1.0 if ref_peak > 0 else 1.0
    omega_sq = gamma1 * gamma2 * max(ratio, 1e-3)
    return gamma1, gamma_phi, omega_sq


def fit_qubit_saturation(detuning: Sequence[float], p_vna: Sequence[float],
                         s21: Sequence[complex], omega_q: float,
                         p_ref: Optional[float] = None) -> QubitFitResult:
    """
    Joint fit of the qubit transmission dip over detuning and drive power

    The drive strength scales as omega_d^2 = omega_d_ref^2 * p_vna / p_ref and the
    qubit is assumed to decay only into the line (gamma1 = gamma1e).

    Args:
        detuning: angular detunings, one per sample
        p_vna: source power in watts, one per sample
        s21: measured complex transmission, one per sample
        omega_q: qubit angular frequency for the power conversion
        p_ref: reference source power; defaults to the largest power measured

    Returns:
        QubitFitResult with a_in = p_d / p_vna

    Raises:
        InsufficientDataError: fewer than 2 powers or 5 detunings
        FitFailureError: no contrast or no convergence
    """
    detuning = np.asarray(detuning, dtype=float)
    p_vna = np.asarray(p_vna, dtype=float)
    s21 = np.asarray(s21, dtype=complex)
    if not (detuning.shape == p_vna.shape == s21.shape) or detuning.ndim != 1:
        raise ValidationError("detuning, p_vna and s21 must be 1-D sequences of equal length")
    if np.any(p_vna <= 0):
        raise ValidationError("source powers must be positive")
    if len(np.unique(p_vna)) < MIN_QUBIT_POWERS:
        raise InsufficientDataError(f"qubit fit needs at least {MIN_QUBIT_POWERS} powers")
    if len(np.unique(detuning)) < MIN_QUBIT_DETUNINGS:
        raise InsufficientDataError(f"qubit fit needs at least {MIN_QUBIT_DETUNINGS} detunings")
    if not omega_q > 0:
        raise ValidationError("omega_q must be positive")

    contrast = float(np.max(np.abs(1.0 - s21)))
    if contrast < 1e-9:
        raise FitFailureError("qubit data show no contrast; decay rates are unidentifiable",
                              nfev=0)

    if p_ref is None:
        p_ref = float(np.max(p_vna))
    power_scale = p_vna / p_ref

    gamma1_0, gamma_phi_0, omega_sq_0 = _initial_rates(detuning, p_vna, s21, p_ref)
    scale = gamma1_0
    x0 = np.log([gamma1_0 / scale, gamma_phi_0 / scale, omega_sq_0 / scale ** 2])

    def model(params):
        gamma1 = scale * math.exp(params[0])
        gamma_phi = scale * math.exp(params[1])
        omega_sq = scale ** 2 * math.exp(params[2]) * power_scale
        gamma2 = gamma_phi + gamma1 / 2.0
        x = detuning / gamma2
        return 1.0 - (gamma1 / (2.0 * gamma2)) * (1.0 + 1j * x) / (
            1.0 + x ** 2 + omega_sq / (gamma1 * gamma2))

    def residuals(params):
        diff = model(params) - s21
        return np.concatenate((diff.real, diff.imag))

    result = optimize.least_squares(residuals, x0, method="lm", xtol=QUBIT_FIT_TOLERANCE,
                                    ftol=QUBIT_FIT_TOLERANCE, gtol=QUBIT_FIT_TOLERANCE,
                                    max_nfev=QUBIT_FIT_MAX_EVALUATIONS)
    if not result.success:
        raise FitFailureError(f"qubit saturation fit did not converge: {result.message}",
                              status=result.status, nfev=result.nfev, cost=result.cost)

    gamma1 = scale * math.exp(result.x[0])
    gamma_phi = scale * math.exp(result.x[1])
    omega_d_ref = scale * math.exp(0.5 * result.x[2])
    p_d = omega_d_ref ** 2 * HBAR * omega_q / (2.0 * gamma1)
    rms = float(np.sqrt(np.mean(result.fun ** 2)))

    logger.info("Qubit fit: gamma1/2pi=%.4g Hz gamma_phi/2pi=%.4g Hz A_in=%.2f dB (nfev=%d)",
                gamma1 / (2 * math.pi), gamma_phi / (2 * math.pi), ratio_to_db(p_d / p_ref),
                result.nfev)
    return QubitFitResult(gamma1=gamma1, gamma_phi=gamma_phi, omega_d_ref=omega_d_ref,
                          p_ref=p_ref, a_in=p_d / p_ref, residual_rms=rms, nfev=int(result.nfev))


# ---------------------------------------------------------------- data files

def _read_columns(path: Union[str, Path], expected: Sequence[str],
                  optional: Sequence[str] = ()) -> Tuple[List[str], np.ndarray]:
    path = Path(path)
    with open(path, 'r', encoding='utf-8') as f:
        header = [col.strip() for col in f.readline().strip().split(",")]
    if header[:len(expected)] != list(expected) or any(
            col not in optional for col in header[len(expected):]):
        raise ValidationError(f"{path}: expected header '{','.join(expected)}', "
                              f"got '{','.join(header)}'")
    try:
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as e:
        raise ValidationError(f"{path}: {e}") from e
    if table.shape[0] == 0:
        raise InsufficientDataError(f"{path}: no data rows")
    return header, table


def load_noise_spectra(path: Union[str, Path]) -> NoiseSpectra:
    """Read `freq_hz,p_on_dbm,p_off_dbm[,g_s_db]` into watts"""
    header, table = _read_columns(path, NOISE_SPECTRA_HEADER, (NOISE_SPECTRA_GAIN_COLUMN,))
    g_s_db = table[:, 3] if len(header) > 3 else None
    return NoiseSpectra(freq_hz=table[:, 0], p_on_w=dbm_to_watts(table[:, 1]),
                        p_off_w=dbm_to_watts(table[:, 2]), g_s_db=g_s_db)


def load_qubit_data(path: Union[str, Path]) -> QubitData:
    """Read `detuning_hz,p_vna_dbm,re_s21,im_s21` into angular detuning and watts"""
    _, table = _read_columns(path, QUBIT_DATA_HEADER)
    return QubitData(detuning=2.0 * math.pi * table[:, 0], p_vna=dbm_to_watts(table[:, 1]),
                     s21=table[:, 2] + 1j * table[:, 3])
