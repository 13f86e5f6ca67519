"""
Base class for kinetic-inductance current laws
"""
from abc import ABC, abstractmethod
from typing import List, Tuple

import numpy as np

from ..models import KineticInductorModel, ModelKind


class InductanceLaw(ABC):
    """
    One current law L_k(I) = L_k0 * (1 + r(I))

    Fitting works on the normalized current u = I / i_ref so that every
    fitted parameter is of order one.
    """

    kind: ModelKind

    @abstractmethod
    def relative_increase(self, model: KineticInductorModel, current):
        """r(I) for the given model; raises when the law breaks down"""
        pass

    @abstractmethod
    def parameter_names(self) -> List[str]:
        """Names of the normalized parameters, in fit order"""
        pass

    @abstractmethod
    def shape(self, u: np.ndarray, params: np.ndarray, model: KineticInductorModel) -> np.ndarray:
        """r(u) for normalized parameters"""
        pass

    @abstractmethod
    def jacobian(self, u: np.ndarray, params: np.ndarray, model: KineticInductorModel) -> np.ndarray:
        """d r / d params, shape (len(u), len(params))"""
        pass

    @abstractmethod
    def initial_guess(self, u: np.ndarray, increase: np.ndarray,
                      model: KineticInductorModel) -> np.ndarray:
        """Starting point from the measured relative increase"""
        pass

    @abstractmethod
    def to_model(self, params: np.ndarray, i_ref: float,
                 template: KineticInductorModel) -> KineticInductorModel:
        """Physical model from fitted normalized parameters"""
        pass

    def bounds(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Parameter bounds; unbounded laws can use an unconstrained solver"""
        n = len(self.parameter_names())
        return np.full(n, -np.inf), np.full(n, np.inf)

    @property
    def bounded(self) -> bool:
        return False

    @staticmethod
    def current_scale(normalized: float, i_ref: float, power: int) -> float:
        """Convert a fitted k = (i_ref / I*)^power back into I*"""
        if normalized <= 0:
            return float("inf")
        return i_ref / normalized ** (1.0 / power)
