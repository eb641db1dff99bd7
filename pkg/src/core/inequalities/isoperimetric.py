from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from src.core.errors import ParameterDomainError
from src.core.geometry.manifold import RadialManifold
from src.utils.logger import setup_logger

ISOPERIMETRIC_TOL = 1e-12

logger = setup_logger('Isoperimetric')


@dataclass
class IsoperimetricReport:
    """
    Per-radius slack A(ρ) - n (ω_n AVR)^{1/n} V(ρ)^{(n-1)/n}

    The pass test reads the slack relative to A(ρ).
    """
    manifold: str
    min_slack: float
    min_relative_slack: float
    worst_rho: float
    tolerance: float
    diagnostic: bool
    rows: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.min_relative_slack >= -self.tolerance

    @property
    def status(self) -> str:
        if self.passed:
            return 'OK'
        return 'WARNING' if self.diagnostic else 'ERROR'

    def as_dict(self) -> dict:
        return {
            'manifold': self.manifold,
            'min_slack': self.min_slack,
            'min_relative_slack': self.min_relative_slack,
            'worst_rho': self.worst_rho,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'status': self.status,
            'diagnostic': self.diagnostic,
            'rows': self.rows,
        }


def isoperimetric_check(manifold: RadialManifold, grid: Sequence[float],
                        tol: float = ISOPERIMETRIC_TOL) -> IsoperimetricReport:
    """
    Compare the perimeter of each metric ball with the sharp isoperimetric bound

    Equality holds for every ball on a cone.
    """
    rho = np.asarray(grid, dtype=float)
    if rho.size == 0 or np.any(rho <= 0.0):
        raise ParameterDomainError("Isoperimetric grid must be non-empty and positive")
    n = manifold.n

    perimeter = np.asarray(manifold.area(rho), dtype=float)
    volume = np.asarray(manifold.volume(rho), dtype=float)
    bound = n * (manifold.omega * manifold.avr) ** (1.0 / n) * volume ** ((n - 1.0) / n)
    slack = perimeter - bound
    relative = slack / perimeter

    worst = int(np.argmin(relative))
    rows = [{'rho': float(r), 'perimeter': float(a), 'bound': float(b), 'slack': float(s),
             'relative_slack': float(q)}
            for r, a, b, s, q in zip(rho, perimeter, bound, slack, relative)]
    report = IsoperimetricReport(manifold=manifold.label, min_slack=float(np.min(slack)),
                                 min_relative_slack=float(relative[worst]),
                                 worst_rho=float(rho[worst]), tolerance=tol,
                                 diagnostic=manifold.is_diagnostic, rows=rows)
    if not report.passed:
        logger.warning(f"Isoperimetric bound violated on {manifold.label} at ρ={report.worst_rho:.6g}: "
                       f"relative slack {report.min_relative_slack:.3e}")
    return report
