"""
Depairing-limited kinetic-inductance law
"""
from dataclasses import replace
from typing import List

import numpy as np

from .base import InductanceLaw
from ..errors import SuperconductivityBreakdownError
from ..models import KineticInductorModel, ModelKind

# keeps the normalized current strictly inside the pole at I = I**
_EDGE = 1e-9


class ClemLaw(InductanceLaw):
    """L_k0 / [1 - (I / I**)^n]^(1/n)"""

    kind = ModelKind.CLEM

    def relative_increase(self, model: KineticInductorModel, current):
        x = np.abs(np.asarray(current, dtype=float)) / model.i_star_star
        if np.any(x >= 1.0):
            raise SuperconductivityBreakdownError(
                f"current reaches the depairing scale I** = {model.i_star_star:.4g} A")
        n = model.n_exp
        return (1.0 - x ** n) ** (-1.0 / n) - 1.0

    def parameter_names(self) -> List[str]:
        return ["w"]

    def shape(self, u, params, model):
        n = model.n_exp
        x = u * params[0]
        return (1.0 - x ** n) ** (-1.0 / n) - 1.0

    def jacobian(self, u, params, model):
        n = model.n_exp
        w = params[0]
        x = u * w
        return ((1.0 - x ** n) ** (-1.0 / n - 1.0) * x ** (n - 1.0) * u)[:, np.newaxis]

    def initial_guess(self, u, increase, model):
        n = model.n_exp
        idx = int(np.argmax(np.abs(increase)))
        if u[idx] <= 0:
            return np.array([0.5])
        # small-current expansion r ~ x^n / n
        x0 = min((n * abs(float(increase[idx]))) ** (1.0 / n), 0.95)
        return np.array([min(max(x0 / u[idx], 1e-6), 1.0 - 1e-3)])

    def bounds(self, u):
        upper = (1.0 - _EDGE) / float(np.max(u))
        return np.array([1e-12]), np.array([upper])

    @property
    def bounded(self) -> bool:
        return True

    def to_model(self, params, i_ref, template):
        w = float(params[0])
        i_star_star = i_ref / w if w > 0 else float("inf")
        return replace(template, model_kind=self.kind, i_star_star=i_star_star)
