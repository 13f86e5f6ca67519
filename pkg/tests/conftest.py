"""
Shared fixtures for the ki-paramp test suite
"""
import math

import pytest

from ki_paramp.models import ModelKind, KineticInductorModel, TransmissionLineSegment
from ki_paramp.presets import design_preset, environment_preset, prototype_preset

TWO_PI = 2.0 * math.pi
F0 = TWO_PI * 8e9


@pytest.fixture
def reference_design():
    return design_preset("reference-device")


@pytest.fixture
def worked_design():
    return design_preset("worked-synthesis")


@pytest.fixture
def standing_wave_env():
    return environment_preset("standing-wave-env")


@pytest.fixture
def worked_prototype():
    return prototype_preset("getsinger-17dB", 0.0625)


@pytest.fixture
def quarter_wave():
    return TransmissionLineSegment(z_c=70.0, length_fraction=0.25, f_ref=F0)


@pytest.fixture
def half_wave():
    return TransmissionLineSegment(z_c=33.0, length_fraction=0.5, f_ref=F0)


@pytest.fixture
def ki_template():
    """Partially kinetic inductor used as the fit template"""
    return KineticInductorModel(model_kind=ModelKind.PARABOLIC, l_k0=0.8e-9, l_geo=0.2e-9)
