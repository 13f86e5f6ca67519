"""
Quadratic plus quartic kinetic-inductance law
"""
from dataclasses import replace
from typing import List

import numpy as np

from .base import InductanceLaw
from ..models import KineticInductorModel, ModelKind


class QuarticLaw(InductanceLaw):
    """L_k0 (1 + (I / I*2)^2 + (I / I*4)^4)"""

    kind = ModelKind.QUARTIC

    def relative_increase(self, model: KineticInductorModel, current):
        current = np.asarray(current)
        return (current / model.i_star2) ** 2 + (current / model.i_star4) ** 4

    def parameter_names(self) -> List[str]:
        return ["k2", "k4"]

    def shape(self, u, params, model):
        return params[0] * u ** 2 + params[1] * u ** 4

    def jacobian(self, u, params, model):
        return np.column_stack([u ** 2, u ** 4])

    def initial_guess(self, u, increase, model):
        scale = max(float(np.max(np.abs(increase))), 1e-6)
        return np.array([scale / 2.0, scale / 2.0])

    def to_model(self, params, i_ref, template):
        return replace(template, model_kind=self.kind,
                       i_star2=self.current_scale(params[0], i_ref, 2),
                       i_star4=self.current_scale(params[1], i_ref, 4))
