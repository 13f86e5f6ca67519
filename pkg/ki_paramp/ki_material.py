"""
Kinetic-inductance material models, pump coefficients and curve fitting
"""
import logging
import math
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import constants, optimize

from .errors import (
    FitFailureError,
    InsufficientDataError,
    SuperconductivityBreakdownError,
    ValidationError,
)
from .materials import law_for
from .models import (
    KiFitResult,
    KineticInductorModel,
    ModelKind,
    PumpCoefficients,
    PumpOperatingPoint,
)

logger = logging.getLogger(__name__)

KI_CURVE_HEADER = "i_dc_A,dfrac"

# damped least-squares settings shared by all inductance fits
FIT_TOLERANCE = 1e-10
FIT_MAX_EVALUATIONS = 200


class Xi3Ceiling(NamedTuple):
    max_xi3: float
    optimal_ip_fraction: float
    dimensionless_max: float


def kinetic_inductance(model: KineticInductorModel, i_dc) -> Union[float, np.ndarray]:
    """
    Kinetic inductance L_k(I) of the model, without the geometric term

    Args:
        model: inductor model
        i_dc: current in amperes (scalar or array)

    Returns:
        inductance in henries
    """
    law = law_for(model.model_kind)
    value = model.l_k0 * (1.0 + law.relative_increase(model, i_dc))
    if np.ndim(value) == 0:
        return float(value)
    return value


def total_inductance(model: KineticInductorModel, i_dc) -> Union[float, np.ndarray]:
    """Kinetic plus geometric inductance"""
    return kinetic_inductance(model, i_dc) + model.l_geo


def check_operating_point(model: KineticInductorModel, op: PumpOperatingPoint):
    """Raise if bias plus pump amplitude reaches the critical current"""
    if model.i_c is not None and op.i_dc + op.i_p_mag >= model.i_c:
        raise SuperconductivityBreakdownError(
            f"i_dc + |I_p| = {op.i_dc + op.i_p_mag:.4g} A reaches i_c = {model.i_c:.4g} A")


def pump_coefficients(model: KineticInductorModel, op: PumpOperatingPoint,
                      omega0: float) -> PumpCoefficients:
    """
    Three-wave coefficients of a dc-biased, pumped kinetic inductor

    The quadratic scale i_star2 is used for every coefficient regardless of
    the inductance law.

    Args:
        model: inductor model
        op: bias and pump
        omega0: resonance frequency of the nonlinear resonator, rad/s

    Returns:
        PumpCoefficients
    """
    check_operating_point(model, op)
    l_i = kinetic_inductance(model, op.i_dc)
    if l_i <= 0:
        raise ValidationError("pump coefficients need a non-zero kinetic inductance")

    i_star = model.i_star2
    if math.isinf(i_star):
        return PumpCoefficients(delta_l=0j, alpha=0.0, xi3=0j, kerr=0.0, pump_shift=0.0, l_i=l_i)

    denominator = i_star ** 2 + op.i_dc ** 2
    ratio = op.i_dc * op.i_p_mag / denominator
    conj_phase = np.exp(-1j * op.phi_p)
    delta_l = complex(1.5 * ratio * l_i * conj_phase)
    alpha = 9.0 / 16.0 * ratio ** 2
    xi3 = complex(-1.5 * ratio * omega0 * conj_phase)

    curvature = (8.0 * op.i_dc ** 2 - i_star ** 2) / denominator ** 2
    kerr = 0.75 * curvature * constants.hbar * omega0 ** 2 / l_i
    pump_shift = 1.5 * curvature * omega0 * op.i_p_mag ** 2
    return PumpCoefficients(delta_l=delta_l, alpha=alpha, xi3=xi3, kerr=kerr,
                            pump_shift=pump_shift, l_i=l_i)


def xi3_upper_bound(i_c: float, omega0: float, i_star_factor: float = 5.7,
                    grid_points: int = 2001) -> Xi3Ceiling:
    """
    Largest |xi3| reachable when i_dc + |I_p| = i_c and I*^2 = i_star_factor * i_c^2

    A dense grid locates the maximum, a bounded scalar search refines it.
    """
    if not i_c > 0:
        raise ValidationError("i_c must be positive")

    def efficiency(ip):
        i_dc = i_c - ip
        return 1.5 * i_dc * ip / (i_star_factor * i_c ** 2 + i_dc ** 2)

    grid = np.linspace(0.0, i_c, grid_points)[1:-1]
    idx = int(np.argmax(efficiency(grid)))
    lo = grid[max(idx - 1, 0)]
    hi = grid[min(idx + 1, len(grid) - 1)]
    refined = optimize.minimize_scalar(lambda ip: -efficiency(ip), bounds=(lo, hi),
                                       method="bounded", options={"xatol": 1e-12 * i_c})
    best_ip = float(refined.x) if refined.success else float(grid[idx])
    best = float(efficiency(best_ip))
    return Xi3Ceiling(max_xi3=best * omega0, optimal_ip_fraction=best_ip / i_c,
                      dimensionless_max=best)


def stepped_filter_qe(n_sections: int, z_h: float, z_l: float, z0: float, z_nr: float) -> float:
    """External Q of a resonator loaded through an N-section stepped-impedance filter"""
    if n_sections < 1:
        raise ValidationError("n_sections must be at least 1")
    for name, value in (("z_h", z_h), ("z_l", z_l), ("z0", z0), ("z_nr", z_nr)):
        if not value > 0:
            raise ValidationError(f"{name} must be positive")
    return (z_h / z_l) ** (2 * n_sections) * math.pi * z0 / (4.0 * z_nr)


def external_linewidth(q_e: float, omega0: float) -> float:
    """Leakage linewidth omega0 / Q_e through the bias filter"""
    if not q_e > 0:
        raise ValidationError("q_e must be positive")
    return omega0 / q_e


def jj_inductance(l_j0: float, current: float, i_jc: float) -> float:
    """Josephson inductance L_J0 / sqrt(1 - I^2 / I_c^2)"""
    if abs(current) >= i_jc:
        raise SuperconductivityBreakdownError("current reaches the junction critical current")
    return l_j0 / math.sqrt(1.0 - (current / i_jc) ** 2)


def jj_alpha(i_dc: float, i_p_mag: float, i_jc: float) -> float:
    """Modulation strength of a dc-biased junction, for comparison with kinetic inductors"""
    return 0.25 * (i_dc * i_p_mag / (i_jc ** 2 + i_dc ** 2)) ** 2


def participation_ratio(model: KineticInductorModel) -> float:
    """Kinetic fraction of the total inductance"""
    return model.l_k0 / (model.l_k0 + model.l_geo)


def frequency_shift(model: KineticInductorModel, i_dc) -> np.ndarray:
    """Fractional resonance shift -1/2 * participation * r(I)"""
    law = law_for(model.model_kind)
    return -0.5 * participation_ratio(model) * law.relative_increase(model, i_dc)


def fit_ki_curve(data: Sequence[Tuple[float, float]], model_kind,
                 template: Optional[KineticInductorModel] = None) -> KiFitResult:
    """
    Fit a kinetic-inductance law to a fractional frequency-shift curve

    Args:
        data: (i_dc in A, delta_omega / omega) pairs
        model_kind: ModelKind or its string value
        template: supplies l_k0, l_geo, n_exp and i_c; defaults to a purely
                  kinetic inductor of unit l_k0

    Returns:
        KiFitResult with the fitted model and RMS residual of the shift
    """
    kind = ModelKind(model_kind)
    law = law_for(kind)
    points = np.asarray(data, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or len(points) < 4:
        raise InsufficientDataError("fit needs at least 4 (i_dc, shift) points")

    if template is None:
        template = KineticInductorModel(model_kind=ModelKind.PARABOLIC, l_k0=1.0)
    beta = participation_ratio(template)
    if beta <= 0:
        raise ValidationError("template has no kinetic inductance to fit")

    currents = np.abs(points[:, 0])
    shifts = points[:, 1]
    i_ref = float(np.max(currents))
    if i_ref <= 0:
        raise InsufficientDataError("fit needs at least one non-zero bias current")

    if np.all(shifts == 0):
        logger.info("No measurable frequency shift; reporting an unbounded current scale")
        params = np.zeros(len(law.parameter_names()))
        return KiFitResult(model=law.to_model(params, i_ref, template), residual_rms=0.0, nfev=0)

    u = currents / i_ref
    increase = -2.0 * shifts / beta

    def residuals(params):
        return -0.5 * beta * law.shape(u, params, template) - shifts

    def jacobian(params):
        return -0.5 * beta * law.jacobian(u, params, template)

    x0 = law.initial_guess(u, increase, template)
    solver = dict(jac=jacobian, xtol=FIT_TOLERANCE, ftol=FIT_TOLERANCE,
                  gtol=FIT_TOLERANCE, max_nfev=FIT_MAX_EVALUATIONS)
    if law.bounded:
        result = optimize.least_squares(residuals, x0, method="trf", bounds=law.bounds(u), **solver)
    else:
        result = optimize.least_squares(residuals, x0, method="lm", **solver)

    if not result.success:
        raise FitFailureError(f"{kind.value} fit did not converge: {result.message}",
                              status=result.status, nfev=result.nfev, cost=result.cost)

    rms = float(np.sqrt(np.mean(result.fun ** 2)))
    fitted = law.to_model(result.x, i_ref, template)
    logger.debug("%s fit: params=%s rms=%.3e nfev=%d", kind.value,
                 dict(zip(law.parameter_names(), result.x)), rms, result.nfev)
    return KiFitResult(model=fitted, residual_rms=rms, nfev=int(result.nfev))


def load_ki_curve(path: Union[str, Path]) -> np.ndarray:
    """Read a two-column `i_dc_A,dfrac` file into an (N, 2) array"""
    path = Path(path)
    with open(path, 'r', encoding='utf-8') as f:
        header = f.readline().strip().replace(" ", "")
    if header != KI_CURVE_HEADER:
        raise ValidationError(f"{path}: expected header '{KI_CURVE_HEADER}', got '{header}'")
    try:
        return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as e:
        raise ValidationError(f"{path}: {e}") from e
