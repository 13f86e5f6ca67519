"""
Exact two-port arithmetic for lossless lines and lumped elements

Every function accepts a scalar angular frequency; the ABCD helpers also
accept numpy arrays so a whole frequency grid is transformed in one pass.
"""
import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np

from .errors import SingularReflectionError, ValidationError
from .models import ArrayLike, ReflectionConvention, TransmissionLineSegment, TwoPortKind

# relative size below which a denominator is treated as an exact zero
SINGULAR_RTOL = 1e-12


class OpenCircuit:
    """Marker for an infinite impedance"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OPEN_CIRCUIT"

    def __reduce__(self):
        return (OpenCircuit, ())


OPEN_CIRCUIT = OpenCircuit()

Immittance = Union[complex, OpenCircuit]


@dataclass(frozen=True)
class TwoPortMatrix:
    """ABCD matrix; entries may be scalars or arrays over a frequency grid"""
    a: ArrayLike
    b: ArrayLike
    c: ArrayLike
    d: ArrayLike

    @classmethod
    def identity(cls) -> "TwoPortMatrix":
        return cls(1.0 + 0j, 0j, 0j, 1.0 + 0j)

    def __matmul__(self, other: "TwoPortMatrix") -> "TwoPortMatrix":
        return TwoPortMatrix(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
        )

    @property
    def determinant(self) -> ArrayLike:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        """2x2 complex array (scalar entries only)"""
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def impedance_with_shunt_load(self, y_load: ArrayLike) -> ArrayLike:
        """Port-1 impedance with port 2 terminated in admittance y_load"""
        return (self.a + self.b * y_load) / (self.c + self.d * y_load)

    def admittance_with_load(self, z_load: Immittance) -> ArrayLike:
        """Port-1 admittance with port 2 terminated in impedance z_load"""
        if z_load is OPEN_CIRCUIT:
            return self.c / self.a
        return (self.c * z_load + self.d) / (self.a * z_load + self.b)


def elementary_two_port(kind: Union[TwoPortKind, str], value, omega: ArrayLike) -> TwoPortMatrix:
    """
    ABCD matrix of a series impedance, shunt admittance or line section

    Args:
        kind: TwoPortKind (or its string value)
        value: complex immittance, or a TransmissionLineSegment for lines
        omega: angular frequency in rad/s (scalar or array)

    Returns:
        TwoPortMatrix
    """
    kind = TwoPortKind(kind)
    if np.any(np.asarray(omega) <= 0):
        raise ValidationError("omega must be positive")

    if kind is TwoPortKind.SERIES_IMPEDANCE:
        return TwoPortMatrix(1.0 + 0j, complex(value), 0j, 1.0 + 0j)
    if kind is TwoPortKind.SHUNT_ADMITTANCE:
        return TwoPortMatrix(1.0 + 0j, 0j, complex(value), 1.0 + 0j)

    if not isinstance(value, TransmissionLineSegment):
        raise ValidationError("line two-port needs a TransmissionLineSegment")
    theta = value.electrical_length(omega)
    cos_t = np.cos(theta) + 0j
    sin_t = np.sin(theta)
    return TwoPortMatrix(cos_t, 1j * value.z_c * sin_t, 1j * sin_t / value.z_c, cos_t)


def cascade(matrices: Sequence[TwoPortMatrix]) -> TwoPortMatrix:
    """Ordered product of two-ports, port-1 side first"""
    if not matrices:
        raise ValidationError("cascade needs at least one two-port")
    return reduce(lambda left, right: left @ right, matrices)


def line_chain(lines: Sequence[TransmissionLineSegment], omega: ArrayLike) -> TwoPortMatrix:
    """Cascade of line sections; identity for an empty sequence"""
    if not lines:
        return TwoPortMatrix.identity()
    return cascade([elementary_two_port(TwoPortKind.LINE, line, omega) for line in lines])


def input_impedance(line: TransmissionLineSegment, z_load: Immittance, omega: float) -> Immittance:
    """
    Impedance seen through a line section towards z_load

    Returns OPEN_CIRCUIT when the transform diverges, e.g. a shorted
    quarter-wave section at its design frequency.
    """
    if not omega > 0:
        raise ValidationError("omega must be positive")
    theta = line.electrical_length(omega)
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    z_c = line.z_c

    if z_load is OPEN_CIRCUIT:
        if abs(sin_t) <= SINGULAR_RTOL:
            return OPEN_CIRCUIT
        return z_c * cos_t / (1j * sin_t)

    z_load = complex(z_load)
    numerator = z_load * cos_t + 1j * z_c * sin_t
    denominator = z_c * cos_t + 1j * z_load * sin_t
    if abs(denominator) <= SINGULAR_RTOL * (z_c + abs(z_load)):
        return OPEN_CIRCUIT
    return z_c * numerator / denominator


def reflection_coefficient(z_in, z_ref,
                           convention: ReflectionConvention = ReflectionConvention.POWER):
    """
    Reflection coefficient of z_in against a (possibly complex) reference

    Scalar inputs raise SingularReflectionError when z_in = -z_ref; array
    inputs carry complex infinity at those points instead.
    """
    convention = ReflectionConvention(convention)
    if z_in is OPEN_CIRCUIT:
        return 1.0 + 0j

    z_in_arr = np.asarray(z_in, dtype=complex)
    z_ref_arr = np.asarray(z_ref, dtype=complex)
    mirrored = np.conj(z_ref_arr) if convention is ReflectionConvention.POWER else z_ref_arr
    denominator = z_in_arr + z_ref_arr
    singular = np.abs(denominator) <= SINGULAR_RTOL * np.abs(z_ref_arr)

    if z_in_arr.ndim == 0 and z_ref_arr.ndim == 0:
        if singular:
            raise SingularReflectionError(f"z_in = {complex(z_in_arr)} cancels the reference")
        return complex((z_in_arr - mirrored) / denominator)

    with np.errstate(divide="ignore", invalid="ignore"):
        gamma = (z_in_arr - mirrored) / denominator
    return np.where(singular, complex(math.inf, 0.0), gamma)


def gain_db(gamma) -> ArrayLike:
    """Power gain 20 log10 |gamma|"""
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(np.abs(gamma))
