"""
Kinetic-inductance current laws
"""
from typing import Dict

from .base import InductanceLaw
from .parabolic import ParabolicLaw
from .quartic import QuarticLaw
from .clem import ClemLaw
from ..models import ModelKind

LAWS: Dict[ModelKind, InductanceLaw] = {
    ModelKind.PARABOLIC: ParabolicLaw(),
    ModelKind.QUARTIC: QuarticLaw(),
    ModelKind.CLEM: ClemLaw(),
}


def law_for(kind) -> InductanceLaw:
    """Law implementing the given ModelKind (or its string value)"""
    return LAWS[ModelKind(kind)]


__all__ = [
    'InductanceLaw',
    'ParabolicLaw',
    'QuarticLaw',
    'ClemLaw',
    'LAWS',
    'law_for',
]
