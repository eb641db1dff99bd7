from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.constants import SobolevParams
from src.core.bubbles.functionals import (BubbleQuery, H_limit_constant, K_limit_constant,
                                          L1_limit_constant, L2_limit_constant, check_K_hypothesis,
                                          ckn_K, gaussian_L, talenti_H)
from src.core.errors import DivergentIntegralError
from src.core.geometry.manifold import RadialManifold
from src.core.numerics.extrapolation import (TOWARD_INFINITY, TOWARD_ZERO, LimitEstimate,
                                             extrapolate_limit, geometric_grid, sample_on_grid)
from src.utils.logger import setup_logger

LIMIT_TOL = 1e-6

logger = setup_logger('BubbleAsymptotics')


def default_large_grid(count: int = 12) -> np.ndarray:
    """λ ∈ [1e2, 1e6], the λ→∞ window for H and K"""
    return geometric_grid(1e2, 1e6, count)


def default_small_grid(count: int = 12) -> np.ndarray:
    """λ ∈ [1e-6, 1e-1], the λ→0 window for L₁ and L₂"""
    return geometric_grid(1e-6, 1e-1, count)


@dataclass
class AsymptoticReport:
    """Extrapolated limit against its closed-form prediction"""
    name: str
    measured: LimitEstimate
    predicted: float
    relative_deviation: float
    tolerance: float = LIMIT_TOL
    diagnostic: bool = False

    @property
    def passed(self) -> bool:
        return self.measured.reliable and self.relative_deviation <= self.tolerance

    @property
    def status(self) -> str:
        if self.passed:
            return 'OK'
        if self.relative_deviation <= self.tolerance:
            return 'WARNING'
        return 'ERROR'

    def series(self) -> Sequence[Tuple[float, float]]:
        return self.measured.samples

    def as_dict(self) -> dict:
        return {
            'name': self.name,
            'measured': self.measured.as_dict(),
            'predicted': self.predicted,
            'relative_deviation': self.relative_deviation,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'status': self.status,
            'diagnostic': self.diagnostic,
        }


def _report(name: str, manifold: RadialManifold, samples, direction: str, predicted: float,
            tolerance: float) -> AsymptoticReport:
    estimate = extrapolate_limit(samples, direction)
    deviation = abs(estimate.limit - predicted) / abs(predicted)
    report = AsymptoticReport(name=name, measured=estimate, predicted=predicted,
                              relative_deviation=deviation, tolerance=tolerance,
                              diagnostic=manifold.is_diagnostic)
    logger.info(f"""
    Asymptotic check {name} on {manifold.label}:
    - Measured limit: {estimate.limit:.15g} (reliable: {estimate.reliable})
    - Predicted limit: {predicted:.15g}
    - Relative deviation: {deviation:.3e}
    - Status: {report.status}
    """)
    return report


def verify_H_asymptotic(manifold: RadialManifold, params: SobolevParams, s: float,
                        grid: Optional[Sequence[float]] = None, n_jobs: int = 1,
                        tolerance: float = LIMIT_TOL) -> AsymptoticReport:
    """λ^{s-n/p'} H(λ, s) as λ→∞ against ω_n AVR Γ(n/p'+1) Γ(s-n/p') / Γ(s)"""
    n, pc = manifold.n, params.p_conj
    if not params.is_endpoint and not s > n / pc:
        raise DivergentIntegralError(f"H asymptotics need s > n/p' = {n / pc:g}, got {s}")
    grid = default_large_grid() if grid is None else grid
    exponent = s - n / pc

    def sample(lam: float) -> Tuple[float, float]:
        return lam, lam ** exponent * talenti_H(BubbleQuery(manifold, params, lam, s=s))

    samples = sample_on_grid(sample, grid, n_jobs)
    predicted = H_limit_constant(n, manifold.avr, pc, s)
    return _report(f"H(s={s:g})", manifold, samples, TOWARD_INFINITY, predicted, tolerance)


def verify_L_asymptotics(manifold: RadialManifold, params: SobolevParams,
                         grid: Optional[Sequence[float]] = None, n_jobs: int = 1,
                         tolerance: float = LIMIT_TOL) -> Tuple[AsymptoticReport, AsymptoticReport]:
    """λ^{n/p'} L₁ and λ^{n/p'+1} L₂ as λ→0 against their Gamma-function limits"""
    n, pc = manifold.n, params.p_conj
    grid = default_small_grid() if grid is None else grid
    values = sample_on_grid(lambda lam: (lam,) + gaussian_L(manifold, params, lam), grid, n_jobs)

    l1_samples = [(lam, lam ** (n / pc) * l1) for lam, l1, _ in values]
    l2_samples = [(lam, lam ** (n / pc + 1.0) * l2) for lam, _, l2 in values]
    l1_report = _report('L1', manifold, l1_samples, TOWARD_ZERO,
                        L1_limit_constant(n, manifold.avr, pc), tolerance)
    l2_report = _report('L2', manifold, l2_samples, TOWARD_ZERO,
                        L2_limit_constant(n, manifold.avr, pc), tolerance)
    return l1_report, l2_report


def verify_L_ratio(manifold: RadialManifold, params: SobolevParams,
                   grid: Optional[Sequence[float]] = None, n_jobs: int = 1,
                   tolerance: float = 1e-8) -> AsymptoticReport:
    """λL₂/L₁ → n/p' as λ→0"""
    n, pc = manifold.n, params.p_conj
    grid = default_small_grid() if grid is None else grid

    def sample(lam: float) -> Tuple[float, float]:
        l1, l2 = gaussian_L(manifold, params, lam)
        return lam, lam * l2 / l1

    samples = sample_on_grid(sample, grid, n_jobs)
    return _report('lambda*L2/L1', manifold, samples, TOWARD_ZERO, n / pc, tolerance)


def verify_K_asymptotic(manifold: RadialManifold, r: float, t: float, s: float,
                        grid: Optional[Sequence[float]] = None, n_jobs: int = 1,
                        tolerance: float = LIMIT_TOL) -> AsymptoticReport:
    """λ^{s-(n+r)/t} K(λ, r, t, s) as λ→∞ against (n/t) ω_n AVR Γ((n+r)/t) Γ(s-(n+r)/t) / Γ(s)"""
    n = manifold.n
    check_K_hypothesis(n, r, t, s)
    grid = default_large_grid() if grid is None else grid
    exponent = s - (n + r) / t

    def sample(lam: float) -> Tuple[float, float]:
        return lam, lam ** exponent * ckn_K(manifold, lam, r, t, s)

    samples = sample_on_grid(sample, grid, n_jobs)
    predicted = K_limit_constant(n, manifold.avr, r, t, s)
    return _report(f"K(r={r:g}, t={t:g}, s={s:g})", manifold, samples, TOWARD_INFINITY,
                   predicted, tolerance)


def truncation_sequence(manifold: RadialManifold, params: SobolevParams, lam: float, s: float,
                        levels: Sequence[float]) -> Tuple[list, float]:
    """Truncated H_k(λ, s) for each k in levels, and the untruncated H(λ, s)"""
    query = BubbleQuery(manifold, params, lam, s=s)
    truncated = [talenti_H(query, k=k) for k in levels]
    full = talenti_H(query)
    return truncated, full
