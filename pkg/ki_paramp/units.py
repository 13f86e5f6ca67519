"""
SI unit parsing for config values and command-line overrides
"""
import math
import re
from enum import Enum
from typing import Dict, Tuple, Union

from .errors import ValidationError


class Dimension(Enum):
    FREQUENCY = "frequency"
    IMPEDANCE = "impedance"
    CAPACITANCE = "capacitance"
    INDUCTANCE = "inductance"
    CURRENT = "current"
    TIME = "time"
    POWER = "power"
    RATIO = "ratio"
    TEMPERATURE = "temperature"
    ANGLE = "angle"
    NUMBER = "number"


# unit -> (dimension, scale); dBm and dB are converted separately
UNITS: Dict[str, Tuple[Dimension, float]] = {
    "Hz": (Dimension.FREQUENCY, 1.0),
    "kHz": (Dimension.FREQUENCY, 1e3),
    "MHz": (Dimension.FREQUENCY, 1e6),
    "GHz": (Dimension.FREQUENCY, 1e9),
    "ohm": (Dimension.IMPEDANCE, 1.0),
    "Ω": (Dimension.IMPEDANCE, 1.0),
    "kohm": (Dimension.IMPEDANCE, 1e3),
    "kΩ": (Dimension.IMPEDANCE, 1e3),
    "F": (Dimension.CAPACITANCE, 1.0),
    "nF": (Dimension.CAPACITANCE, 1e-9),
    "pF": (Dimension.CAPACITANCE, 1e-12),
    "fF": (Dimension.CAPACITANCE, 1e-15),
    "H": (Dimension.INDUCTANCE, 1.0),
    "nH": (Dimension.INDUCTANCE, 1e-9),
    "pH": (Dimension.INDUCTANCE, 1e-12),
    "A": (Dimension.CURRENT, 1.0),
    "mA": (Dimension.CURRENT, 1e-3),
    "uA": (Dimension.CURRENT, 1e-6),
    "µA": (Dimension.CURRENT, 1e-6),
    "s": (Dimension.TIME, 1.0),
    "ms": (Dimension.TIME, 1e-3),
    "us": (Dimension.TIME, 1e-6),
    "ns": (Dimension.TIME, 1e-9),
    "W": (Dimension.POWER, 1.0),
    "mW": (Dimension.POWER, 1e-3),
    "K": (Dimension.TEMPERATURE, 1.0),
    "mK": (Dimension.TEMPERATURE, 1e-3),
    "rad": (Dimension.ANGLE, 1.0),
    "deg": (Dimension.ANGLE, math.pi / 180.0),
    "pi": (Dimension.ANGLE, math.pi),
}

_LOWER_UNITS = {}
for _unit, _entry in UNITS.items():
    _LOWER_UNITS.setdefault(_unit.lower(), []).append(_entry)

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s\d].*?)?\s*$")


def _lookup_unit(unit: str, key: str) -> Tuple[Dimension, float]:
    if unit in UNITS:
        return UNITS[unit]
    candidates = _LOWER_UNITS.get(unit.lower(), [])
    if len(candidates) == 1:
        return candidates[0]
    raise ValidationError(f"{key}: unknown unit '{unit}'")


def parse_quantity(value: Union[str, int, float], dimension: Dimension, key: str = "value") -> float:
    """
    Convert a number or a "<number> <unit>" string to SI

    Bare numbers are already SI. Angles accept "pi" as a multiplier
    ("-0.7 pi"); powers accept dBm; ratios accept dB.

    Raises:
        ValidationError: naming key, for malformed values or units of another dimension
    """
    if isinstance(value, bool):
        raise ValidationError(f"{key}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValidationError(f"{key}: expected a number or a quantity string, got {value!r}")

    match = _QUANTITY.match(value)
    if not match:
        raise ValidationError(f"{key}: cannot parse quantity '{value}'")
    number = float(match.group(1))
    unit = match.group(2)
    if not unit:
        return number

    if unit == "dBm":
        if dimension is not Dimension.POWER:
            raise ValidationError(f"{key}: unit 'dBm' is a power, expected {dimension.value}")
        return 1e-3 * 10.0 ** (number / 10.0)
    if unit == "dB":
        if dimension is not Dimension.RATIO:
            raise ValidationError(f"{key}: unit 'dB' is a ratio, expected {dimension.value}")
        return 10.0 ** (number / 10.0)

    unit_dimension, scale = _lookup_unit(unit, key)
    if unit_dimension is not dimension:
        raise ValidationError(f"{key}: unit '{unit}' is a {unit_dimension.value}, "
                              f"expected {dimension.value}")
    return number * scale


def parse_span(value: str, dimension: Dimension = Dimension.FREQUENCY,
               key: str = "span") -> Tuple[float, float, float]:
    """Parse "start:stop:step" (e.g. "7.9GHz:8.9GHz:1MHz") into SI values"""
    if isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = str(value).split(":")
    if len(parts) != 3:
        raise ValidationError(f"{key}: expected start:stop:step, got '{value}'")
    start, stop, step = (parse_quantity(p, dimension, key) for p in parts)
    if not step > 0:
        raise ValidationError(f"{key}: step must be positive")
    if stop < start:
        raise ValidationError(f"{key}: stop must not precede start")
    return start, stop, step
