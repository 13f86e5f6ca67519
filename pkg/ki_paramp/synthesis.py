"""
Three-stage impedance-transformer synthesis from band-pass prototype values
"""
import logging
import math
from typing import NamedTuple

from .errors import SynthesisInfeasibleError, ValidationError
from .models import PrototypeCoefficients, SynthesisResult

logger = logging.getLogger(__name__)

# reference impedance below this fraction of z0 is treated as degenerate
DEGENERATE_FRACTION = 1e-6


class TransformedResonator(NamedTuple):
    z_nr_primed: float
    r_nr_primed: float


def transform_nr(z_ki: float, z_nr: float, r_nr: float) -> TransformedResonator:
    """Resonator impedance and negative resistance seen through the KI quarter-wave inverter"""
    for name, value in (("z_ki", z_ki), ("z_nr", z_nr), ("r_nr", r_nr)):
        if not value > 0:
            raise ValidationError(f"{name} must be positive")
    return TransformedResonator(z_nr_primed=z_ki ** 2 / z_nr, r_nr_primed=z_ki ** 2 / r_nr)


def half_wave_coefficient(z_quarter: float, z_parallel: float, z0: float) -> float:
    """Linear coefficient of the quadratic fixing the half-wave line impedance"""
    z0_primed = z_quarter ** 2 / z0
    return (z_quarter / 2.0 - z_quarter * z0_primed / (2.0 * z0)
            + 2.0 * z0_primed ** 2 / (math.pi * z_parallel))


def half_wave_residual(z_half: float, z_quarter: float, z_parallel: float, z0: float) -> float:
    """Residual of Z^2 + b Z - Z0'^2 at z_half"""
    z0_primed = z_quarter ** 2 / z0
    b = half_wave_coefficient(z_quarter, z_parallel, z0)
    return z_half ** 2 + b * z_half - z0_primed ** 2


def solve_half_wave(z_quarter: float, z_parallel: float, z0: float) -> float:
    """Unique positive root of Z^2 + b Z - Z0'^2 = 0, cancellation-free"""
    z0_primed = z_quarter ** 2 / z0
    b = half_wave_coefficient(z_quarter, z_parallel, z0)
    c = -z0_primed ** 2
    discriminant = b * b - 4.0 * c
    if c >= 0 or discriminant < 0:
        raise SynthesisInfeasibleError("half-wave quadratic has no positive root")
    root_disc = math.sqrt(discriminant)
    if b > 0:
        root = -2.0 * c / (b + root_disc)
    else:
        root = (-b + root_disc) / 2.0
    if not root > 0:
        raise SynthesisInfeasibleError("half-wave quadratic has no positive root")
    return root


def synthesize_transformer(proto: PrototypeCoefficients, z_nr: float, z_ki: float,
                           z0: float = 50.0) -> SynthesisResult:
    """
    Element values of the three-stage transformer

    Args:
        proto: prototype coefficients and fractional bandwidth
        z_nr: characteristic impedance of the nonlinear resonator
        z_ki: characteristic impedance of the KI quarter-wave line
        z0: port impedance

    Returns:
        SynthesisResult
    """
    if not z0 > 0:
        raise ValidationError("z0 must be positive")
    transformed = transform_nr(z_ki, z_nr, z_nr)
    z_nr_primed = transformed.z_nr_primed

    z_ref = proto.epsilon * z_nr_primed / proto.g1
    if z_ref < DEGENERATE_FRACTION * z0:
        raise SynthesisInfeasibleError(
            f"reference impedance {z_ref:.3e} ohm is degenerate for epsilon={proto.epsilon:g}")

    z_quarter = math.sqrt(proto.g3 * z_ref * z0)
    z_parallel = proto.epsilon * z_ref / proto.g2
    z_half = solve_half_wave(z_quarter, z_parallel, z0)
    residual = half_wave_residual(z_half, z_quarter, z_parallel, z0)

    logger.debug("Z_parallel = %.4f ohm gives Z_half = %.4f ohm; a tenfold Z_parallel "
                 "(%.4f ohm) would give Z_half = %.4f ohm", z_parallel, z_half,
                 10.0 * z_parallel, solve_half_wave(z_quarter, 10.0 * z_parallel, z0))
    logger.info("Synthesized Z_ref=%.3f, Z_quarter=%.3f, Z_half=%.3f ohm",
                z_ref, z_quarter, z_half)

    return SynthesisResult(
        z_ref=z_ref,
        z_quarter=z_quarter,
        z_parallel=z_parallel,
        z_half=z_half,
        z_nr_primed=z_nr_primed,
        r_nr_primed=proto.g0 * z_ref,
        residual=residual,
    )


def predict_fractional_bandwidth(g1: float, z_nr_primed: float, r_nr_primed: float,
                                 g0: float = 1.0) -> float:
    """
    Fractional bandwidth whose synthesis reference impedance is g0 * R'_NR

    Inverts Z'_NR = (g1 / epsilon) Z_ref; a stronger pump lowers R_NR, raises
    R'_NR and widens the band.
    """
    for name, value in (("g1", g1), ("z_nr_primed", z_nr_primed), ("r_nr_primed", r_nr_primed)):
        if not value > 0:
            raise ValidationError(f"{name} must be positive")
    return g1 * g0 * r_nr_primed / z_nr_primed
