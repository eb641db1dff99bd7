"""Volume non-collapsing forced by a weighted Sobolev inequality with constant C.

If the Caffarelli-Kohn-Nirenberg inequality with weights (a, b) holds with
constant C on a Ric >= 0 manifold, every ball satisfies
Vol(B(ρ)) >= (K_{a,b}/C)^{n/(a+1-b)} ω_n ρ^n.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from src.core.constants import ckn_constants
from src.core.errors import ParameterDomainError
from src.core.geometry.manifold import RadialManifold
from src.utils.logger import setup_logger

NONCOLLAPSE_TOL = 1e-10

logger = setup_logger('NonCollapse')


def noncollapse_bound(n: int, a: float, b: float, c: float) -> float:
    """
    Lower bound (K_{a,b}/C)^{n/(a+1-b)} on the asymptotic volume ratio

    A constant C below K_{a,b} cannot occur on a Ric >= 0 manifold; it is
    clamped to K_{a,b} with a warning.

    Raises:
        ParameterDomainError: (a, b) inadmissible or C not positive
    """
    ckn = ckn_constants(n, a, b)
    if not c > 0.0:
        raise ParameterDomainError(f"Inequality constant must be positive, got {c}")
    if c < ckn.k_ab:
        logger.warning(f"Constant C={c:.15g} is below K_(a,b)={ckn.k_ab:.15g}; clamping to K_(a,b)")
        c = ckn.k_ab
    return (ckn.k_ab / c) ** (n / ckn.weight_gap)


@dataclass
class NonCollapseReport:
    manifold: str
    bound: float
    avr: float
    min_ratio: float
    worst_rho: float
    tolerance: float
    diagnostic: bool
    rows: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.min_ratio >= self.avr - self.tolerance
                and self.avr >= self.bound - self.tolerance)

    @property
    def status(self) -> str:
        if self.passed:
            return 'OK'
        return 'WARNING' if self.diagnostic else 'ERROR'

    def as_dict(self) -> dict:
        return {
            'manifold': self.manifold,
            'bound': self.bound,
            'avr': self.avr,
            'min_ratio': self.min_ratio,
            'worst_rho': self.worst_rho,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'status': self.status,
            'diagnostic': self.diagnostic,
            'rows': self.rows,
        }


def noncollapse_check(manifold: RadialManifold, a: float, b: float, c: float,
                      grid: Sequence[float], tol: float = NONCOLLAPSE_TOL) -> NonCollapseReport:
    """Vol(B(ρ))/(ω_n ρ^n) >= AVR >= noncollapse_bound on every grid radius"""
    rho = np.asarray(grid, dtype=float)
    if rho.size == 0 or np.any(rho <= 0.0):
        raise ParameterDomainError("Non-collapse grid must be non-empty and positive")
    bound = noncollapse_bound(manifold.n, a, b, c)
    ratio = np.asarray(manifold.volume_ratio(rho), dtype=float)
    worst = int(np.argmin(ratio))

    rows = [{'rho': float(r), 'volume_ratio': float(q), 'bound': bound} for r, q in zip(rho, ratio)]
    report = NonCollapseReport(manifold=manifold.label, bound=bound, avr=manifold.avr,
                               min_ratio=float(ratio[worst]), worst_rho=float(rho[worst]),
                               tolerance=tol, diagnostic=manifold.is_diagnostic, rows=rows)
    logger.info(f"""
    Non-collapse check on {manifold.label}:
    - Weights: a={a:g}, b={b:g}, C={c:.15g}
    - AVR lower bound: {bound:.15g}
    - AVR: {manifold.avr:.15g}
    - Smallest volume ratio: {report.min_ratio:.15g} at ρ={report.worst_rho:.6g}
    - Status: {report.status}
    """)
    return report
