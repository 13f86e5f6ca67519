"""
Quadratic kinetic-inductance law
"""
from dataclasses import replace
from typing import List

import numpy as np

from .base import InductanceLaw
from ..models import KineticInductorModel, ModelKind


class ParabolicLaw(InductanceLaw):
    """L_k0 (1 + (I / I*2)^2)"""

    kind = ModelKind.PARABOLIC

    def relative_increase(self, model: KineticInductorModel, current):
        return (np.asarray(current) / model.i_star2) ** 2

    def parameter_names(self) -> List[str]:
        return ["k2"]

    def shape(self, u, params, model):
        return params[0] * u ** 2

    def jacobian(self, u, params, model):
        return (u ** 2)[:, np.newaxis]

    def initial_guess(self, u, increase, model):
        return np.array([max(float(np.max(np.abs(increase))), 1e-6)])

    def to_model(self, params, i_ref, template):
        return replace(template, model_kind=self.kind,
                       i_star2=self.current_scale(params[0], i_ref, 2))
