import math
from dataclasses import dataclass, field
from typing import Dict, Optional

QUOTIENT_TOL = 1e-8


@dataclass
class QuotientReport:
    """Both sides of an inequality evaluated on one test function.

    ``slack`` is positive when the inequality holds with room to spare.
    For quotient inequalities ``ratio`` is the constant the test function
    requires and ``sharp_bound`` the sharp constant; for additive
    inequalities ``ratio`` is None and ``sharp_bound`` is the additive term.
    """
    inequality: str
    manifold: str
    function: str
    lhs: float
    rhs: float
    ratio: Optional[float]
    sharp_bound: float
    slack: float
    tolerance: float = QUOTIENT_TOL
    diagnostic: bool = False
    details: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.slack) and self.slack >= -self.tolerance

    @property
    def status(self) -> str:
        if self.passed:
            return 'OK'
        return 'WARNING' if self.diagnostic else 'ERROR'

    def as_dict(self) -> dict:
        return {
            'inequality': self.inequality,
            'manifold': self.manifold,
            'function': self.function,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'ratio': self.ratio,
            'sharp_bound': self.sharp_bound,
            'slack': self.slack,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'status': self.status,
            'diagnostic': self.diagnostic,
            'details': self.details,
        }
