"""
Pumped reflection simulation of the full amplifier network
"""
import logging
import math
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import find_peaks

from .engine import SweepEngine
from .errors import (
    InsufficientDataError,
    NoGainError,
    OscillationPoleError,
    ValidationError,
)
from .ki_material import pump_coefficients, total_inductance
from .models import (
    BandwidthReport,
    DesignSpec,
    EnvironmentModel,
    GainProfile,
    MapCell,
    ModulatedInductor,
    PolicyMode,
    PowerLawFit,
    Pump,
    PumpBiasMap,
    PumpCoefficients,
    PumpOperatingPoint,
    PumpPolicy,
    ReflectionConvention,
    SignalIdlerPair,
    XiPump,
)
from .netcore import gain_db, line_chain, reflection_coefficient
from .pump_element import effective_admittance, idler_admittance, negative_resistance

logger = logging.getLogger(__name__)

PEAK_PROMINENCE_DB = 0.5
DEFAULT_FREQ_STEP = 2 * math.pi * 1e6


def environment_impedance(env: EnvironmentModel, omega):
    """Z_env(omega) = z0 + sum z_n e^{i(omega tau_n + phi_n)}"""
    return env.impedance(omega)


def nr_resonance(design: DesignSpec, i_dc: float = 0.0) -> float:
    """Resonance 1/sqrt(L0 C) of the nonlinear resonator at the given bias"""
    return 1.0 / math.sqrt(total_inductance(design.ki_model, i_dc) * design.c_shunt)


def modulated_inductor(design: DesignSpec,
                       pump: Pump) -> Tuple[ModulatedInductor, Optional[PumpCoefficients]]:
    """
    Linearized inductor for a physical or xi3-specified pump

    Physical pumps derive delta_l from the bias and pump currents; the
    geometric inductance dilutes the resulting modulation strength. xi3
    pumps convert |xi3| to alpha on their own XiScale.
    """
    l0 = total_inductance(design.ki_model, pump.i_dc)
    omega0 = 1.0 / math.sqrt(l0 * design.c_shunt)
    if isinstance(pump, PumpOperatingPoint):
        coeffs = pump_coefficients(design.ki_model, pump, omega0)
        return ModulatedInductor(l0=l0, delta_l=coeffs.delta_l), coeffs
    alpha = pump.scale.alpha(pump.xi3, omega0)
    delta_l = 2.0 * math.sqrt(alpha) * l0 * np.exp(1j * pump.phi_p)
    return ModulatedInductor(l0=l0, delta_l=complex(delta_l)), None


class ReflectionModel:
    """
    Pump-independent part of the network on one frequency grid

    One instance serves every step of a pump ramp at fixed
    (design, environment, omega_p).
    """

    def __init__(self, design: DesignSpec, env: Optional[EnvironmentModel], omega_p: float,
                 freqs: Sequence[float],
                 convention: ReflectionConvention = ReflectionConvention.POWER):
        freqs = np.asarray(freqs, dtype=float)
        if freqs.ndim != 1 or freqs.size == 0:
            raise ValidationError("frequency grid must be a non-empty 1-D sequence")
        if freqs.size > 1 and np.any(np.diff(freqs) <= 0):
            raise ValidationError("frequency grid must be strictly increasing")
        if np.any(freqs <= 0) or np.any(omega_p - freqs <= 0):
            raise ValidationError("every grid point needs positive signal and idler frequencies")

        self.design = design
        self.freqs = freqs
        self.convention = ReflectionConvention(convention)
        self.pair = SignalIdlerPair.from_pump(freqs, omega_p)
        self.y_idler = idler_admittance(design, env, self.pair.omega_i)
        self.chain = line_chain(design.lines_from_port(), freqs)
        self.z_ref = env.impedance(freqs) if env is not None else design.z0
        self.y_cap = 1j * freqs * design.c_shunt

    def profile(self, ind: ModulatedInductor) -> GainProfile:
        """Reflection spectrum for one linearized inductor"""
        y_eff = effective_admittance(ind, self.pair, self.y_idler)
        with np.errstate(divide="ignore", invalid="ignore"):
            z_in = self.chain.impedance_with_shunt_load(self.y_cap + y_eff)
            s11 = reflection_coefficient(z_in, self.z_ref, self.convention)
        unstable = ~np.isfinite(y_eff) | ~np.isfinite(z_in) | ~np.isfinite(s11)
        s11 = np.where(unstable, complex(math.inf, 0.0), s11)
        gains = np.where(unstable, math.inf, gain_db(s11))
        return GainProfile(freqs=self.freqs, s11=s11, gain_db=gains)


def gain_spectrum(design: DesignSpec, op: Pump, env: Optional[EnvironmentModel],
                  freq_grid: Sequence[float],
                  convention: ReflectionConvention = ReflectionConvention.POWER) -> GainProfile:
    """
    Pumped S11 over a signal-frequency grid

    Args:
        design: amplifier network
        op: PumpOperatingPoint or XiPump
        env: source environment; None means an ideal z0 termination
        freq_grid: signal angular frequencies, strictly increasing
        convention: reflection reference convention

    Returns:
        GainProfile; points at the oscillation threshold carry +inf gain
    """
    ind, _ = modulated_inductor(design, op)
    return ReflectionModel(design, env, op.omega_p, freq_grid, convention).profile(ind)


def _crossing(freqs: np.ndarray, gains: np.ndarray, unstable: np.ndarray,
              inside: int, outside: int, threshold_db: float) -> float:
    if outside < 0 or outside >= len(freqs) or unstable[outside]:
        return float(freqs[inside])
    f_in, f_out = freqs[inside], freqs[outside]
    g_in, g_out = gains[inside], gains[outside]
    return float(f_in + (threshold_db - g_in) * (f_out - f_in) / (g_out - g_in))


def bandwidth_report(profile: GainProfile, threshold_db: float = 17.0,
                     ripple_max_db: float = 5.0, require_two_peaks: bool = False) -> BandwidthReport:
    """
    Largest contiguous band above threshold, its ripple and the gain peaks in it

    Threshold crossings are linearly interpolated. Oscillating points break a
    band and are counted in the report. Rejection is reported through
    `accepted` and `rejection`, never raised.
    """
    freqs = np.asarray(profile.freqs, dtype=float)
    gains = np.asarray(profile.gain_db, dtype=float)
    if freqs.size == 0:
        raise ValidationError("gain profile is empty")
    unstable = ~np.isfinite(gains)
    n_unstable = int(np.count_nonzero(unstable))

    above = ~unstable & (gains >= threshold_db)
    if not np.any(above):
        report = BandwidthReport.empty(threshold_db)
        report.oscillation_points = n_unstable
        return report

    padded = np.concatenate(([0], above.astype(np.int8), [0]))
    edges = np.flatnonzero(np.diff(padded))
    best = None
    for start, stop in zip(edges[0::2], edges[1::2] - 1):
        left = _crossing(freqs, gains, unstable, start, start - 1, threshold_db)
        right = _crossing(freqs, gains, unstable, stop, stop + 1, threshold_db)
        if best is None or right - left > best[0]:
            best = (right - left, start, stop, left, right)
    width, start, stop, left, right = best

    in_span = gains[start:stop + 1]
    ripple = float(np.max(in_span) - np.min(in_span))

    finite_top = float(np.max(gains[~unstable])) if np.any(~unstable) else threshold_db
    cleaned = np.where(unstable, finite_top + 100.0, gains)
    peak_idx, _ = find_peaks(cleaned, prominence=PEAK_PROMINENCE_DB)
    peaks = [float(freqs[i]) for i in peak_idx if start <= i <= stop]

    report = BandwidthReport(bandwidth=float(width), peak_frequencies=peaks, ripple_db=ripple,
                             threshold_db=threshold_db, contiguous_span=(left, right),
                             oscillation_points=n_unstable)
    if require_two_peaks and report.peak_count < 2:
        report.accepted = False
        report.rejection = "fewer than two gain peaks"
    elif ripple > ripple_max_db:
        report.accepted = False
        report.rejection = f"ripple {ripple:.2f} dB exceeds {ripple_max_db:.2f} dB"
    return report


def centered_grid(center: float, half_width: float, step: float) -> np.ndarray:
    """Grid symmetric about center with the given step"""
    if not step > 0 or not half_width > 0:
        raise ValidationError("grid step and half-width must be positive")
    n = int(math.floor(half_width / step + 1e-9))
    return center + step * np.arange(-n, n + 1)


def span_grid(start: float, stop: float, step: float) -> np.ndarray:
    """start, start + step, ... up to stop inclusive"""
    if not step > 0:
        raise ValidationError("grid step must be positive")
    if stop < start:
        raise ValidationError("grid stop lies below its start")
    n = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(n + 1)


def pump_ramp(policy: PumpPolicy, design: DesignSpec, i_dc: float) -> Iterator[float]:
    """Geometric amplitudes of the policy, capped by i_c (current mode) or alpha < 1 (xi3 mode)"""
    if policy.mode is PolicyMode.CURRENT:
        limit = policy.cap
        if design.ki_model.i_c is not None:
            limit = min(limit, design.ki_model.i_c - i_dc)
    else:
        ceiling = policy.xi_scale.ceiling(nr_resonance(design, i_dc))
        limit = min(policy.cap, ceiling * (1.0 - 1e-9))
    amplitude = policy.start
    while amplitude < limit:
        yield amplitude
        amplitude *= policy.factor


def _pump_for(policy: PumpPolicy, design: DesignSpec, amplitude: float, omega_p: float,
              i_dc: float) -> Pump:
    if policy.mode is PolicyMode.CURRENT:
        return PumpOperatingPoint(i_dc=i_dc, i_p_mag=amplitude, omega_p=omega_p,
                                  i_c=design.ki_model.i_c)
    return XiPump(xi3=amplitude, omega_p=omega_p, i_dc=i_dc, scale=policy.xi_scale)


def best_bandwidth_over_ramp(design: DesignSpec, env: Optional[EnvironmentModel], omega_p: float,
                             i_dc: float, policy: PumpPolicy, offsets: np.ndarray,
                             convention: ReflectionConvention = ReflectionConvention.POWER,
                             threshold_db: float = 17.0,
                             ripple_max_db: float = 5.0) -> MapCell:
    """Ramp the pump at one (omega_p, i_dc) and keep the widest qualifying profile"""
    model = ReflectionModel(design, env, omega_p, omega_p / 2.0 + offsets, convention)
    best = BandwidthReport.empty(threshold_db)
    best_drive = 0.0
    for amplitude in pump_ramp(policy, design, i_dc):
        ind, _ = modulated_inductor(design, _pump_for(policy, design, amplitude, omega_p, i_dc))
        profile = model.profile(ind)
        report = bandwidth_report(profile, threshold_db, ripple_max_db, require_two_peaks=True)
        if report.accepted and report.bandwidth > best.qualifying_bandwidth:
            best, best_drive = report, amplitude
        if profile.max_gain_db >= policy.gain_stop_db:
            break
    return MapCell(omega_p=omega_p, i_dc=i_dc, report=best, drive=best_drive)


def pump_bias_map(design: DesignSpec, env: Optional[EnvironmentModel],
                  omega_p_grid: Sequence[float], i_dc_grid: Sequence[float],
                  policy: Optional[PumpPolicy] = None, freq_step: float = DEFAULT_FREQ_STEP,
                  half_width: Optional[float] = None, threads: Optional[int] = None,
                  convention: ReflectionConvention = ReflectionConvention.POWER,
                  threshold_db: float = 17.0, ripple_max_db: float = 5.0) -> PumpBiasMap:
    """
    Best qualifying 17-dB bandwidth over a pump-frequency by bias grid

    Args:
        design: amplifier network
        env: source environment (None for ideal)
        omega_p_grid: pump angular frequencies
        i_dc_grid: bias currents
        policy: pump ramp; defaults to a xi3 ramp
        freq_step: signal grid step around omega_p / 2
        half_width: half-width of the signal window; defaults to 10% of omega_p / 2
        threads: worker count for the sweep engine

    Returns:
        PumpBiasMap with cells ordered omega_p-major
    """
    omega_p_grid = np.asarray(omega_p_grid, dtype=float)
    i_dc_grid = np.asarray(i_dc_grid, dtype=float)
    if omega_p_grid.size == 0 or i_dc_grid.size == 0:
        raise ValidationError("pump and bias grids must be non-empty")
    policy = policy or PumpPolicy()

    cells = [(omega_p, i_dc) for omega_p in omega_p_grid for i_dc in i_dc_grid]

    def evaluate(cell):
        omega_p, i_dc = cell
        width = half_width if half_width is not None else 0.1 * omega_p / 2.0
        offsets = centered_grid(0.0, width, freq_step)
        return best_bandwidth_over_ramp(design, env, omega_p, i_dc, policy, offsets,
                                        convention, threshold_db, ripple_max_db)

    sweep = SweepEngine(threads).run(evaluate, cells, label="pump-bias map")
    result = PumpBiasMap(omega_p_grid=omega_p_grid, i_dc_grid=i_dc_grid, warnings=sweep.errors)
    for (omega_p, i_dc), cell in zip(cells, sweep.outputs):
        if cell is None:
            cell = MapCell(omega_p=omega_p, i_dc=i_dc, report=BandwidthReport.empty(threshold_db))
        result.cells.append(cell)
    return result


def power_law_fit(x: Sequence[float], y: Sequence[float]) -> PowerLawFit:
    """Least-squares line through (log x, log y)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    valid = np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0)
    if np.count_nonzero(valid) < 4:
        raise InsufficientDataError("power-law fit needs at least 4 valid points")
    slope, intercept = np.polyfit(np.log(x[valid]), np.log(y[valid]), 1)
    return PowerLawFit(exponent=float(slope), prefactor=float(np.exp(intercept)),
                       n_points=int(np.count_nonzero(valid)))


def rnr_power_law(design: DesignSpec, xi3_grid: Sequence[float],
                  env: Optional[EnvironmentModel] = None, omega_p: Optional[float] = None,
                  omega_s: Optional[float] = None, i_dc: float = 0.0) -> PowerLawFit:
    """
    Exponent of the negative resistance at the resonator node versus |xi3|

    Defaults pump at twice the resonance and probe at omega_p / 2.
    """
    xi3_grid = np.asarray(xi3_grid, dtype=float)
    if xi3_grid.size == 0 or np.min(xi3_grid) <= 0:
        raise ValidationError("xi3 grid must be non-empty and positive")
    if np.max(xi3_grid) / np.min(xi3_grid) < math.sqrt(10.0):
        raise ValidationError("xi3 grid must span at least half a decade")

    if omega_p is None:
        omega_p = 2.0 * nr_resonance(design, i_dc)
    if omega_s is None:
        omega_s = omega_p / 2.0
    pair = SignalIdlerPair.from_pump(omega_s, omega_p)
    y_idler = idler_admittance(design, env, float(pair.omega_i))

    xs, resistances = [], []
    for xi3 in xi3_grid:
        try:
            ind, _ = modulated_inductor(design, XiPump(xi3=float(xi3), omega_p=omega_p, i_dc=i_dc))
            y_eff = effective_admittance(ind, pair, y_idler)
            resistances.append(negative_resistance(y_eff))
            xs.append(float(xi3))
        except (NoGainError, OscillationPoleError, ValidationError) as e:
            logger.debug("Skipping xi3=%.4g rad/s: %s", xi3, e)
    return power_law_fit(xs, resistances)
