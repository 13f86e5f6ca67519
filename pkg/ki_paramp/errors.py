"""
Exception hierarchy shared by the library and the command-line front end
"""
from typing import Optional


class KiParampError(Exception):
    """Base class for every error raised by ki_paramp"""

    exit_code = 2


class ValidationError(KiParampError, ValueError):
    """A parameter, config value or input record is out of its domain"""

    exit_code = 1


class InvalidGainError(ValidationError):
    """Amplifier gain at or below unity where a real gain is required"""


class ConfigParseError(ValidationError):
    """A config document could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, source: str = "<config>"):
        self.line = line
        self.column = column
        self.source = source
        where = source
        if line is not None:
            where = f"{source}:{line}"
            if column is not None:
                where = f"{where}:{column}"
        super().__init__(f"{where}: {message}")


class NumericalError(KiParampError, ArithmeticError):
    """Base class for failures of the numerical pipeline"""

    exit_code = 2


class SingularReflectionError(NumericalError):
    """z_in = -z_ref; the reflection coefficient diverges"""


class DegenerateInverterError(NumericalError):
    """The amplification inverter vanishes because the pump is off"""


class OscillationPoleError(NumericalError):
    """The effective admittance has a pole: parametric oscillation threshold"""


class NoGainError(NumericalError):
    """The effective admittance has a non-negative real part"""


class SuperconductivityBreakdownError(NumericalError):
    """Bias plus pump current reaches the critical or depairing current"""


class FitFailureError(NumericalError):
    """A least-squares fit did not converge"""

    def __init__(self, message: str, status: Optional[int] = None,
                 nfev: Optional[int] = None, cost: Optional[float] = None):
        self.status = status
        self.nfev = nfev
        self.cost = cost
        details = []
        if status is not None:
            details.append(f"status={status}")
        if nfev is not None:
            details.append(f"evaluations={nfev}")
        if cost is not None:
            details.append(f"cost={cost:.3e}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)


class SynthesisInfeasibleError(NumericalError):
    """The transformer equations have no usable positive solution"""


class UnphysicalEnvironmentError(NumericalError):
    """The environment impedance has a non-positive real part"""


class InsufficientDataError(NumericalError):
    """Too few valid points to fit or extract a result"""


class SingularNetworkError(NumericalError):
    """A ladder network reduces to a short or open where none is allowed"""


class OutputError(KiParampError, OSError):
    """Results could not be written"""

    exit_code = 3

    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"Cannot write {path}: {reason}")
