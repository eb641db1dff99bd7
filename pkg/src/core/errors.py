from typing import Dict, Optional


class LabError(Exception):
    """Base class for every error raised by the laboratory"""
    # Raised because of the run inputs rather than a failed check
    invalid_input = False

    def __init__(self, message: str, details: Optional[Dict] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        if not self.details:
            return self.message
        extra = ", ".join(f"{k}={v}" for k, v in sorted(self.details.items()))
        return f"{self.message} ({extra})"


class InvalidDimensionError(LabError):
    """Dimension n outside the supported range"""
    invalid_input = True


class ExponentRangeError(LabError):
    """Exponent p outside the range of the requested operation"""
    invalid_input = True


class ParameterDomainError(LabError):
    """Parameter outside its admissible domain (θ, a, b, λ, ...)"""
    invalid_input = True


class ProfileFormatError(LabError):
    """Malformed volume-profile table"""
    invalid_input = True


class InsufficientDataError(LabError):
    """Not enough samples to resolve a tail or a limit"""


class ConvergenceError(LabError):
    """Quadrature or root finding did not converge within its budget"""


class IntegrandDomainError(LabError):
    """Integrand produced a non-finite value"""


class StepSizeError(LabError):
    """Finite-difference stencil leaves the domain"""


class DivergentIntegralError(LabError):
    """Integral hypothesis (s > n/p', st > n + r > 0, ...) violated"""
    invalid_input = True


class AdmissibilityError(LabError):
    """Test function with divergent norms"""
    invalid_input = True


class PreconditionError(LabError):
    """Input violates a documented precondition (normalization, support, ...)"""
    invalid_input = True


class HypothesisViolationError(LabError):
    """Analytic hypothesis of an inequality fails on the sampling grid"""


class IllConditionedInverseError(LabError):
    """Cumulative mass cannot be inverted (plateau or atom in the target)"""


class ConfigError(LabError):
    """Invalid run configuration"""
    invalid_input = True
