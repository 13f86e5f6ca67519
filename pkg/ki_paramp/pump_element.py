"""
Signal/idler linearization of the pumped inductor
"""
import logging
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateInverterError,
    NoGainError,
    OscillationPoleError,
    SingularNetworkError,
)
from .models import (
    ArrayLike,
    DesignSpec,
    EnvironmentModel,
    ModulatedInductor,
    SignalIdlerPair,
    TransmissionLineSegment,
)
from .netcore import OPEN_CIRCUIT, Immittance, line_chain

logger = logging.getLogger(__name__)


class AmplificationInverter(NamedTuple):
    j_s: complex
    j_i: complex


def signal_idler_impedance_matrix(ind: ModulatedInductor, pair: SignalIdlerPair) -> np.ndarray:
    """
    Impedance matrix of the pumped inductor in the (I_s, I_i*) basis

    Args:
        ind: modulated inductor
        pair: scalar signal/idler/pump frequencies

    Returns:
        2x2 complex array
    """
    w_s = float(pair.omega_s)
    w_i = float(pair.omega_i)
    return np.array([
        [1j * w_s * ind.l0, 1j * w_s * ind.delta_l / 2.0],
        [-1j * w_i * np.conj(ind.delta_l) / 2.0, -1j * w_i * ind.l0],
    ], dtype=complex)


def amplification_inverter(ind: ModulatedInductor, pair: SignalIdlerPair) -> AmplificationInverter:
    """Admittance inverters J_s and J_i coupling the signal and idler branches"""
    alpha = ind.alpha
    if alpha <= 0:
        raise DegenerateInverterError("amplification inverter vanishes without modulation")
    scale = np.sqrt(alpha) * np.exp(1j * ind.phase)
    return AmplificationInverter(
        j_s=complex(scale / (float(pair.omega_s) * ind.l0_prime)),
        j_i=complex(scale / (float(pair.omega_i) * ind.l0_prime)),
    )


def ladder_admittance(lines_from_node: Sequence[TransmissionLineSegment], c_shunt: float,
                      z_term: Immittance, omega: ArrayLike) -> ArrayLike:
    """
    Admittance at a node loaded by a shunt capacitor and a line ladder

    Args:
        lines_from_node: line sections, node side first
        c_shunt: shunt capacitance at the node (may be zero)
        z_term: termination at the far end (OPEN_CIRCUIT allowed)
        omega: angular frequency, scalar or array

    Returns:
        complex admittance (array for array omega)
    """
    chain = line_chain(list(lines_from_node), omega)
    if z_term is OPEN_CIRCUIT:
        denominator = chain.a
    else:
        denominator = chain.a * z_term + chain.b
    if np.any(denominator == 0):
        raise SingularNetworkError("ladder presents a short circuit at the node")
    y_far = chain.admittance_with_load(z_term)
    y = 1j * np.asarray(omega) * c_shunt + y_far
    if np.ndim(y) == 0:
        return complex(y)
    return y


def idler_admittance(design: DesignSpec, env: Optional[EnvironmentModel],
                     omega_i: ArrayLike) -> ArrayLike:
    """
    Admittance seen from the inductor node at the idler frequency

    The idler network mirrors the signal network: shunt capacitor, the line
    sections back to the port and the source termination, evaluated at
    omega_i. The inductor itself is excluded.
    """
    if np.any(np.asarray(omega_i) <= 0):
        raise SingularNetworkError("idler frequency must be positive")
    z_term = env.impedance(omega_i) if env is not None else design.z0
    lines = list(reversed(design.lines_from_port()))
    return ladder_admittance(lines, design.c_shunt, z_term, omega_i)


def effective_admittance(ind: ModulatedInductor, pair: SignalIdlerPair,
                         y_idler: ArrayLike) -> ArrayLike:
    """
    Time-independent admittance of the pumped inductor at the signal frequency

    Y_eff = (1 / (i w_s L0')) * [1 + alpha / (i w_i L0' Y_idler* - 1)]

    Scalar evaluation raises OscillationPoleError at the pole; array
    evaluation leaves non-finite values there for the caller to flag.
    """
    l0p = ind.l0_prime
    denominator = 1j * np.asarray(pair.omega_i) * l0p * np.conj(y_idler) - 1.0
    if np.ndim(denominator) == 0:
        if denominator == 0:
            raise OscillationPoleError("idler loading sits exactly on the oscillation threshold")
        return complex((1.0 / (1j * float(pair.omega_s) * l0p)) * (1.0 + ind.alpha / denominator))
    with np.errstate(divide="ignore", invalid="ignore"):
        return (1.0 / (1j * np.asarray(pair.omega_s) * l0p)) * (1.0 + ind.alpha / denominator)


def negative_resistance(y_eff: complex) -> float:
    """R_NR = -1 / Re[y_eff]"""
    conductance = complex(y_eff).real
    if conductance >= 0:
        raise NoGainError(f"effective conductance {conductance:.3e} S is not negative")
    return -1.0 / conductance
