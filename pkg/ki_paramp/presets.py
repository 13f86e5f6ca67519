"""
Named designs, environments, prototypes and search ranges
"""
import math
from typing import Callable, Dict, Optional

from .errors import ValidationError
from .models import (
    CircuitKind,
    DesignSpec,
    EnvironmentModel,
    EnvironmentTerm,
    KineticInductorModel,
    ModelKind,
    PrototypeCoefficients,
    SearchRanges,
    SynthesisResult,
    TransmissionLineSegment,
)
from .synthesis import synthesize_transformer

TWO_PI = 2.0 * math.pi

PROTOTYPES: Dict[str, tuple] = {
    "getsinger-17dB": (1.0, 0.408, 0.234, 1.106),
}
DEFAULT_PROTOTYPE = "getsinger-17dB"

# inputs of the worked synthesis example
WORKED_SYNTHESIS = {"epsilon": 500.0 / 8000.0, "z_nr": 60.0, "z_ki": 180.0, "z0": 50.0}


def prototype_preset(name: str = DEFAULT_PROTOTYPE, epsilon: float = 0.0625) -> PrototypeCoefficients:
    """Prototype coefficient set by name with the requested fractional bandwidth"""
    if name not in PROTOTYPES:
        raise ValidationError(f"unknown prototype '{name}' (known: {', '.join(sorted(PROTOTYPES))})")
    g0, g1, g2, g3 = PROTOTYPES[name]
    return PrototypeCoefficients(g0=g0, g1=g1, g2=g2, g3=g3, epsilon=epsilon)


def design_from_impedances(z_quarter: float, z_half: float, z_nr: float, f0: float,
                           z_ki: Optional[float] = None, z0: float = 50.0,
                           c_shunt: Optional[float] = None,
                           ki_model: Optional[KineticInductorModel] = None) -> DesignSpec:
    """
    Build a design from line and resonator impedances

    Args:
        z_quarter: port-side quarter-wave impedance
        z_half: half-wave impedance
        z_nr: resonator impedance sqrt(L/C)
        f0: design angular frequency for the line lengths
        z_ki: KI quarter-wave impedance; None builds the conventional circuit
        z0: port impedance
        c_shunt: resonator capacitance; defaults to 1 / (f0 z_nr)
        ki_model: inductor model; defaults to a linear inductor z_nr^2 c_shunt

    Returns:
        DesignSpec
    """
    if not z_nr > 0:
        raise ValidationError("z_nr must be positive")
    if c_shunt is None:
        c_shunt = 1.0 / (f0 * z_nr)
    if ki_model is None:
        ki_model = KineticInductorModel(model_kind=ModelKind.PARABOLIC, l_k0=z_nr ** 2 * c_shunt)
    kind = CircuitKind.THREE_STAGE if z_ki is not None else CircuitKind.CONVENTIONAL
    return DesignSpec(
        circuit_kind=kind,
        z0=z0,
        line_quarter=TransmissionLineSegment(z_c=z_quarter, length_fraction=0.25, f_ref=f0),
        line_half=TransmissionLineSegment(z_c=z_half, length_fraction=0.5, f_ref=f0),
        line_ki_quarter=(TransmissionLineSegment(z_c=z_ki, length_fraction=0.25, f_ref=f0)
                         if z_ki is not None else None),
        c_shunt=c_shunt,
        ki_model=ki_model,
        f0=f0,
    )


def design_from_synthesis(result: SynthesisResult, z_nr: float, z_ki: float, f0: float,
                          z0: float = 50.0) -> DesignSpec:
    """Design whose lines carry synthesized impedances"""
    return design_from_impedances(z_quarter=result.z_quarter, z_half=result.z_half, z_nr=z_nr,
                                  f0=f0, z_ki=z_ki, z0=z0)


def _reference_device() -> DesignSpec:
    z_nr = 56.0
    omega0 = TWO_PI * 8e9
    l_geo = 200e-12
    # resonant at the line design frequency: L = z_nr / w0, C = 1 / (w0 z_nr)
    model = KineticInductorModel(
        model_kind=ModelKind.PARABOLIC,
        l_k0=z_nr / omega0 - l_geo,
        l_geo=l_geo,
        i_star2=3.25e-3,
        i_c=1.15e-3,
    )
    return design_from_impedances(z_quarter=80.0, z_half=30.0, z_nr=z_nr, f0=omega0,
                                  z_ki=180.0, ki_model=model)


def _worked_synthesis() -> DesignSpec:
    proto = prototype_preset(DEFAULT_PROTOTYPE, WORKED_SYNTHESIS["epsilon"])
    result = synthesize_transformer(proto, WORKED_SYNTHESIS["z_nr"], WORKED_SYNTHESIS["z_ki"],
                                    WORKED_SYNTHESIS["z0"])
    return design_from_synthesis(result, WORKED_SYNTHESIS["z_nr"], WORKED_SYNTHESIS["z_ki"],
                                 TWO_PI * 8e9, WORKED_SYNTHESIS["z0"])


DESIGNS: Dict[str, Callable[[], DesignSpec]] = {
    "reference-device": _reference_device,
    "worked-synthesis": _worked_synthesis,
}

ENVIRONMENTS: Dict[str, Callable[[], EnvironmentModel]] = {
    "ideal-env": lambda: EnvironmentModel(z0=50.0),
    # delays are quoted as tau/2pi
    "standing-wave-env": lambda: EnvironmentModel(z0=50.0, terms=(
        EnvironmentTerm(z_n=14.2, tau=10.5e-9 / TWO_PI, phi=-0.7 * math.pi),
        EnvironmentTerm(z_n=1.9, tau=121e-9 / TWO_PI, phi=0.0),
    )),
}

SEARCHES: Dict[str, Callable[[], SearchRanges]] = {
    "search-three-stage": lambda: SearchRanges(),
    "search-conventional": lambda: SearchRanges(z_nr=(2.0, 20.0, 1.0),
                                                 circuit_kind=CircuitKind.CONVENTIONAL),
}


def _lookup(table: Dict[str, Callable], name: str, what: str):
    if name not in table:
        raise ValidationError(f"unknown {what} preset '{name}' (known: {', '.join(sorted(table))})")
    return table[name]()


def design_preset(name: str) -> DesignSpec:
    return _lookup(DESIGNS, name, "design")


def environment_preset(name: str) -> EnvironmentModel:
    return _lookup(ENVIRONMENTS, name, "environment")


def search_preset(name: str) -> SearchRanges:
    return _lookup(SEARCHES, name, "search")
