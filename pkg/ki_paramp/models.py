"""
Data models for amplifier designs, pump conditions and results
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np

from .errors import SuperconductivityBreakdownError, UnphysicalEnvironmentError, ValidationError

ArrayLike = Union[float, np.ndarray]


class CircuitKind(Enum):
    """Matching-network topology between the port and the nonlinear resonator"""
    THREE_STAGE = "three-stage"
    CONVENTIONAL = "conventional"


class ModelKind(Enum):
    """Current laws for the kinetic inductance"""
    PARABOLIC = "parabolic"
    QUARTIC = "quartic"
    CLEM = "clem"


class TwoPortKind(Enum):
    """Elementary two-port building blocks"""
    SERIES_IMPEDANCE = "series-impedance"
    SHUNT_ADMITTANCE = "shunt-admittance"
    LINE = "line"


class ReflectionConvention(Enum):
    """How a complex reference impedance enters the reflection coefficient"""
    POWER = "power"
    VOLTAGE = "voltage"


def _require_positive(name: str, value: float):
    if not value > 0 or not math.isfinite(value):
        raise ValidationError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class TransmissionLineSegment:
    """Lossless, dispersionless line section"""
    z_c: float
    length_fraction: float
    f_ref: float  # rad/s at which length_fraction holds

    def __post_init__(self):
        _require_positive("z_c", self.z_c)
        _require_positive("length_fraction", self.length_fraction)
        _require_positive("f_ref", self.f_ref)

    def electrical_length(self, omega: ArrayLike) -> ArrayLike:
        """Electrical length in radians at angular frequency omega"""
        return (omega / self.f_ref) * 2.0 * math.pi * self.length_fraction


@dataclass(frozen=True)
class ModulatedInductor:
    """Inductor L0 + Re[delta_l e^{i omega_p t}] linearized around the pump"""
    l0: float
    delta_l: complex = 0j

    def __post_init__(self):
        _require_positive("l0", self.l0)
        if not self.alpha < 1.0:
            raise ValidationError(f"modulation strength alpha must be < 1, got {self.alpha:.4g}")

    @property
    def alpha(self) -> float:
        return abs(self.delta_l) ** 2 / (4.0 * self.l0 ** 2)

    @property
    def l0_prime(self) -> float:
        return self.l0 * (1.0 - self.alpha)

    @property
    def phase(self) -> float:
        return float(np.angle(self.delta_l))


@dataclass(frozen=True)
class SignalIdlerPair:
    """Three-wave-mixing triple; omega_s may be an array of signal frequencies"""
    omega_s: ArrayLike
    omega_i: ArrayLike
    omega_p: float

    def __post_init__(self):
        if np.any(np.asarray(self.omega_s) <= 0) or np.any(np.asarray(self.omega_i) <= 0):
            raise ValidationError("signal and idler frequencies must be positive")
        _require_positive("omega_p", self.omega_p)
        mismatch = np.abs(np.asarray(self.omega_s) + np.asarray(self.omega_i) - self.omega_p)
        if np.any(mismatch > 1e-12 * self.omega_p):
            raise ValidationError("omega_p must equal omega_s + omega_i")

    @classmethod
    def from_pump(cls, omega_s: ArrayLike, omega_p: float) -> "SignalIdlerPair":
        """Build the pair whose idler is omega_p - omega_s"""
        return cls(omega_s=omega_s, omega_i=omega_p - np.asarray(omega_s), omega_p=omega_p)


@dataclass(frozen=True)
class KineticInductorModel:
    """Current-dependent kinetic inductance plus a fixed geometric series term"""
    model_kind: ModelKind
    l_k0: float
    l_geo: float = 0.0
    i_star2: float = math.inf
    i_star4: Optional[float] = None
    i_star_star: Optional[float] = None
    n_exp: float = 2.21
    i_c: Optional[float] = None

    def __post_init__(self):
        if self.l_k0 < 0 or self.l_geo < 0:
            raise ValidationError("l_k0 and l_geo must be non-negative")
        if self.l_k0 + self.l_geo <= 0:
            raise ValidationError("total inductance must be positive")
        if not self.i_star2 > 0:
            raise ValidationError(f"i_star2 must be positive, got {self.i_star2!r}")
        if self.model_kind is ModelKind.QUARTIC and not (self.i_star4 and self.i_star4 > 0):
            raise ValidationError("quartic model needs a positive i_star4")
        if self.model_kind is ModelKind.CLEM and not (self.i_star_star and self.i_star_star > 0):
            raise ValidationError("clem model needs a positive i_star_star")
        _require_positive("n_exp", self.n_exp)
        if self.i_c is not None:
            _require_positive("i_c", self.i_c)
            if not self.i_c < self.i_star2:
                raise ValidationError("critical current i_c must be below i_star2")


@dataclass(frozen=True)
class PumpOperatingPoint:
    """DC bias and pump tone driving the kinetic inductor"""
    i_dc: float
    i_p_mag: float
    omega_p: float
    phi_p: float = 0.0
    i_c: Optional[float] = None

    def __post_init__(self):
        if self.i_dc < 0:
            raise ValidationError("i_dc must be non-negative")
        if self.i_p_mag < 0:
            raise ValidationError("i_p_mag must be non-negative")
        _require_positive("omega_p", self.omega_p)
        if self.i_c is not None:
            _require_positive("i_c", self.i_c)
            total = self.i_dc + self.i_p_mag
            if total >= self.i_c:
                raise SuperconductivityBreakdownError(
                    f"i_dc + |I_p| = {total:.4g} A reaches i_c = {self.i_c:.4g} A")


class XiScale(Enum):
    """
    How |xi3| maps onto the modulation strength alpha

    HAMILTONIAN is the relation of the closed-form pump coefficients,
    alpha = |xi3|^2 / (4 w0^2). NETWORK reads |xi3| / w0 as sqrt(alpha); gain
    maps, ramps and design searches are expressed on this scale.
    """
    HAMILTONIAN = "hamiltonian"
    NETWORK = "network"

    @property
    def divisor(self) -> float:
        return 4.0 if self is XiScale.HAMILTONIAN else 1.0

    def alpha(self, xi3: float, omega0: float) -> float:
        return xi3 ** 2 / (self.divisor * omega0 ** 2)

    def ceiling(self, omega0: float) -> float:
        """|xi3| at which alpha reaches 1"""
        return math.sqrt(self.divisor) * omega0


@dataclass(frozen=True)
class XiPump:
    """Pump specified directly by its three-wave amplification coefficient |xi3|"""
    xi3: float
    omega_p: float
    i_dc: float = 0.0
    phi_p: float = 0.0
    scale: XiScale = XiScale.NETWORK

    def __post_init__(self):
        if self.xi3 < 0:
            raise ValidationError("xi3 must be non-negative")
        if self.i_dc < 0:
            raise ValidationError("i_dc must be non-negative")
        _require_positive("omega_p", self.omega_p)
        object.__setattr__(self, "scale", XiScale(self.scale))


Pump = Union[PumpOperatingPoint, XiPump]


@dataclass(frozen=True)
class PumpCoefficients:
    """Closed-form pump coefficients of a biased kinetic inductor"""
    delta_l: complex
    alpha: float
    xi3: complex
    kerr: float
    pump_shift: float
    l_i: float


@dataclass(frozen=True)
class PrototypeCoefficients:
    """Band-pass prototype element values and target fractional bandwidth"""
    g0: float
    g1: float
    g2: float
    g3: float
    epsilon: float

    def __post_init__(self):
        for name in ("g0", "g1", "g2", "g3"):
            _require_positive(name, getattr(self, name))
        if not 0 < self.epsilon < 0.5:
            raise ValidationError(f"epsilon must lie in (0, 0.5), got {self.epsilon!r}")


@dataclass(frozen=True)
class SynthesisResult:
    """Element values of a synthesized three-stage transformer"""
    z_ref: float
    z_quarter: float
    z_parallel: float
    z_half: float
    z_nr_primed: float
    r_nr_primed: float
    residual: float = 0.0


@dataclass(frozen=True)
class DesignSpec:
    """Port, transformer lines and nonlinear resonator of one amplifier"""
    circuit_kind: CircuitKind
    z0: float
    line_quarter: TransmissionLineSegment
    line_half: TransmissionLineSegment
    line_ki_quarter: Optional[TransmissionLineSegment]
    c_shunt: float
    ki_model: KineticInductorModel
    f0: float

    def __post_init__(self):
        _require_positive("z0", self.z0)
        _require_positive("c_shunt", self.c_shunt)
        _require_positive("f0", self.f0)
        expected = [("line_quarter", self.line_quarter, 0.25), ("line_half", self.line_half, 0.5)]
        if self.circuit_kind is CircuitKind.THREE_STAGE:
            if self.line_ki_quarter is None:
                raise ValidationError("three-stage design needs line_ki_quarter")
            expected.append(("line_ki_quarter", self.line_ki_quarter, 0.25))
        elif self.line_ki_quarter is not None:
            raise ValidationError("conventional design has no line_ki_quarter")
        for name, line, fraction in expected:
            if not math.isclose(line.length_fraction, fraction) or not math.isclose(line.f_ref, self.f0):
                raise ValidationError(f"{name} must be {fraction} wavelength long at f0")

    def lines_from_port(self) -> List[TransmissionLineSegment]:
        """Line sections in order from the port towards the resonator node"""
        lines = [self.line_quarter, self.line_half]
        if self.line_ki_quarter is not None:
            lines.append(self.line_ki_quarter)
        return lines


@dataclass(frozen=True)
class EnvironmentTerm:
    """One standing-wave term z_n e^{i(omega tau_n + phi_n)}"""
    z_n: float
    tau: float
    phi: float = 0.0


@dataclass(frozen=True)
class EnvironmentModel:
    """Source impedance seen by the amplifier port"""
    z0: float = 50.0
    terms: Tuple[EnvironmentTerm, ...] = ()

    def __post_init__(self):
        _require_positive("z0", self.z0)
        if len(self.terms) > 2:
            raise ValidationError("environment supports at most two standing-wave terms")

    @property
    def is_ideal(self) -> bool:
        return not self.terms

    def impedance(self, omega: ArrayLike) -> ArrayLike:
        """Evaluate Z_env at omega (scalar or array)"""
        omega_arr = np.asarray(omega, dtype=float)
        if np.any(omega_arr < 0):
            raise ValidationError("environment evaluated at negative frequency")
        z = np.full(omega_arr.shape, self.z0, dtype=complex)
        for term in self.terms:
            z = z + term.z_n * np.exp(1j * (omega_arr * term.tau + term.phi))
        if np.any(z.real <= 0):
            raise UnphysicalEnvironmentError("environment impedance has non-positive real part")
        if z.ndim == 0:
            return complex(z)
        return z


@dataclass
class GainProfile:
    """Simulated reflection spectrum"""
    freqs: np.ndarray
    s11: np.ndarray
    gain_db: np.ndarray

    @property
    def oscillating(self) -> np.ndarray:
        return ~np.isfinite(self.gain_db)

    @property
    def max_gain_db(self) -> float:
        if np.any(self.oscillating):
            return math.inf
        return float(np.max(self.gain_db))


@dataclass
class BandwidthReport:
    """Bandwidth, peaks and ripple extracted from one gain profile"""
    bandwidth: float
    peak_frequencies: List[float]
    ripple_db: float
    threshold_db: float
    contiguous_span: Optional[Tuple[float, float]]
    accepted: bool = True
    rejection: Optional[str] = None
    oscillation_points: int = 0

    @property
    def peak_count(self) -> int:
        return len(self.peak_frequencies)

    @property
    def qualifying_bandwidth(self) -> float:
        return self.bandwidth if self.accepted else 0.0

    @classmethod
    def empty(cls, threshold_db: float, reason: str = "no gain above threshold") -> "BandwidthReport":
        return cls(bandwidth=0.0, peak_frequencies=[], ripple_db=0.0, threshold_db=threshold_db,
                   contiguous_span=None, accepted=False, rejection=reason)


class PolicyMode(Enum):
    """Which pump quantity a map ramps"""
    CURRENT = "current"
    XI3 = "xi3"


@dataclass(frozen=True)
class PumpPolicy:
    """Geometric pump ramp used by bias maps"""
    mode: PolicyMode = PolicyMode.XI3
    start: float = 2 * math.pi * 10e6
    step_db: float = 0.1
    cap: float = 2 * math.pi * 4e9
    gain_stop_db: float = 40.0
    xi_scale: XiScale = XiScale.NETWORK

    def __post_init__(self):
        _require_positive("start", self.start)
        _require_positive("step_db", self.step_db)
        if self.cap < 0:
            raise ValidationError("cap must be non-negative")
        object.__setattr__(self, "xi_scale", XiScale(self.xi_scale))

    @property
    def factor(self) -> float:
        """Amplitude ratio between steps for a step_db change in pump power"""
        return 10.0 ** (self.step_db / 20.0)


@dataclass
class MapCell:
    """Best qualifying result of one (omega_p, i_dc) cell"""
    omega_p: float
    i_dc: float
    report: BandwidthReport
    drive: float = 0.0


@dataclass
class PumpBiasMap:
    """Bandwidth over a pump-frequency by bias-current grid, row per omega_p"""
    omega_p_grid: np.ndarray
    i_dc_grid: np.ndarray
    cells: List[MapCell] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def bandwidth_grid(self) -> np.ndarray:
        values = [cell.report.qualifying_bandwidth for cell in self.cells]
        return np.array(values).reshape(len(self.omega_p_grid), len(self.i_dc_grid))


@dataclass(frozen=True)
class PowerLawFit:
    """log-log least-squares line y = prefactor * x**exponent"""
    exponent: float
    prefactor: float
    n_points: int


@dataclass(frozen=True)
class SearchRanges:
    """Grid of the brute-force design search; intervals are (start, stop, step)"""
    z_quarter: Tuple[float, float, float] = (30.0, 100.0, 10.0)
    z_half: Tuple[float, float, float] = (30.0, 100.0, 10.0)
    z_nr: Tuple[float, float, float] = (50.0, 100.0, 10.0)
    omega_p_half: Tuple[float, float, float] = (
        2 * math.pi * 7.5e9, 2 * math.pi * 8.5e9, 2 * math.pi * 0.25e9)
    z_ki: float = 150.0
    omega0: float = 2 * math.pi * 8e9
    circuit_kind: CircuitKind = CircuitKind.THREE_STAGE
    z0: float = 50.0
    xi3_start: float = 2 * math.pi * 1e6
    xi3_factor: float = 1.02
    xi3_cap: float = 2 * math.pi * 4e9
    gain_stop_db: float = 40.0
    threshold_db: float = 17.0
    ripple_max_db: float = 5.0
    window: float = 2 * math.pi * 0.6e9
    freq_step: float = 2 * math.pi * 2e6
    xi_scale: XiScale = XiScale.NETWORK

    def __post_init__(self):
        for name in ("z_quarter", "z_half", "z_nr", "omega_p_half"):
            start, stop, step = getattr(self, name)
            if not step > 0:
                raise ValidationError(f"{name} step must be positive")
            if stop < start:
                raise ValidationError(f"{name} range is empty")
            if not start > 0:
                raise ValidationError(f"{name} must be positive")
        _require_positive("omega0", self.omega0)
        _require_positive("z0", self.z0)
        _require_positive("xi3_start", self.xi3_start)
        _require_positive("window", self.window)
        _require_positive("freq_step", self.freq_step)
        if not self.xi3_factor > 1:
            raise ValidationError("xi3_factor must exceed 1")
        if self.circuit_kind is CircuitKind.THREE_STAGE:
            _require_positive("z_ki", self.z_ki)
        object.__setattr__(self, "xi_scale", XiScale(self.xi_scale))


@dataclass(frozen=True)
class DesignRecord:
    """One qualifying grid point of a design search"""
    z_quarter: float
    z_half: float
    z_nr: float
    omega_p_half: float
    max_bandwidth: float
    optimal_xi3: float
    eta: float


@dataclass(frozen=True)
class ZnrSummary:
    """Statistics of qualifying designs sharing one resonator impedance"""
    z_nr: float
    mean_bandwidth: float
    std_bandwidth: float
    max_eta: float
    min_eta: float
    capacitance: float
    count: int


@dataclass(frozen=True)
class NoiseChainModel:
    """Gains, attenuations and noise numbers of the measurement cascade"""
    a_in: float
    a_23: float
    n_t23: float
    g_s: float
    g_sys: float
    n_sys: float
    n1: float = 0.5

    def __post_init__(self):
        for name in ("a_in", "a_23"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValidationError(f"{name} must be a power ratio in [0, 1]")
        for name in ("g_s", "g_sys"):
            _require_positive(name, getattr(self, name))
        if self.n_t23 < 0 or self.n_sys < 0:
            raise ValidationError("noise quanta must be non-negative")
        if self.n1 < 0.5:
            raise ValidationError("n1 cannot fall below the vacuum value 0.5")


@dataclass(frozen=True)
class QubitCalibration:
    """Transmon coupled to the measurement line, used as a power standard"""
    omega_q: float
    gamma1e: float
    gamma1i: float = 0.0
    gamma_phi: float = 0.0

    def __post_init__(self):
        _require_positive("omega_q", self.omega_q)
        _require_positive("gamma1e", self.gamma1e)
        if self.gamma1i < 0 or self.gamma_phi < 0:
            raise ValidationError("decay rates must be non-negative")

    @property
    def gamma1(self) -> float:
        return self.gamma1e + self.gamma1i

    @property
    def gamma2(self) -> float:
        return self.gamma_phi + self.gamma1 / 2.0


@dataclass(frozen=True)
class QubitFitResult:
    """Joint saturation-spectroscopy fit"""
    gamma1: float
    gamma_phi: float
    omega_d_ref: float
    p_ref: float
    a_in: float
    residual_rms: float
    nfev: int


@dataclass(frozen=True)
class KiFitResult:
    """Kinetic-inductance fit to a frequency-shift curve"""
    model: KineticInductorModel
    residual_rms: float
    nfev: int
