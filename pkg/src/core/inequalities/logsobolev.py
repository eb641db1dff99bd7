import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from src.core.bubbles.asymptotics import default_large_grid, default_small_grid
from src.core.bubbles.functionals import gaussian_L
from src.core.constants import SobolevParams, log_sobolev_constant
from src.core.errors import AdmissibilityError, PreconditionError
from src.core.geometry.manifold import RadialManifold, radial_integral
from src.core.inequalities.functions import RadialFunction, require_normalized
from src.core.inequalities.quotient import QUOTIENT_TOL, QuotientReport
from src.core.numerics.extrapolation import (TOWARD_INFINITY, TOWARD_ZERO, LimitEstimate,
                                             extrapolate_limit, sample_on_grid)
from src.core.numerics.quadrature import DEFAULT_TOL
from src.utils.logger import setup_logger

NORMALIZATION_TOL = 1e-8

logger = setup_logger('LogSobolev')


def _entropy(manifold: RadialManifold, f: RadialFunction, p: float, tol: float) -> float:
    """∫ |f|^p log |f|^p dv"""

    def integrand(rho: float) -> float:
        v = abs(f(rho)) ** p
        return v * math.log(v) if v > 0.0 else 0.0

    tail = f.integrand_tail(p, manifold.n)
    return radial_integral(manifold, integrand, tail=tail, tol=tol, scale=f.scale,
                           points=f.breakpoints).value


def logsob_quotient(manifold: RadialManifold, params: SobolevParams, f: RadialFunction,
                    auto_renormalize: bool = False, norm_tol: float = NORMALIZATION_TOL,
                    tol: float = DEFAULT_TOL, slack_tol: float = QUOTIENT_TOL) -> QuotientReport:
    """
    Both sides of ∫|f|^p log|f|^p <= (n/p) log(L(n,p) AVR^{-p/n} ∫|∇f|^p)

    Raises:
        PreconditionError: ∫|f|^p != 1 and auto_renormalize is off
    """
    n, p = params.n, params.p
    f = require_normalized(f, manifold, p, auto_renormalize, norm_tol, tol=tol)
    energy = f.gradient_power(manifold, p, tol=tol).value
    if not energy > 0.0:
        raise AdmissibilityError(f"{f.name} has vanishing gradient norm")

    lhs = _entropy(manifold, f, p, tol)
    sharp = log_sobolev_constant(n, p) * manifold.avr ** (-p / n)
    rhs = (n / p) * math.log(sharp * energy)
    ratio = math.exp(p * lhs / n) / energy

    return QuotientReport(inequality='log-sobolev', manifold=manifold.label, function=f.name,
                          lhs=lhs, rhs=rhs, ratio=ratio, sharp_bound=sharp, slack=rhs - lhs,
                          tolerance=slack_tol, diagnostic=manifold.is_diagnostic,
                          details={'p': p, 'gradient_p_norm_power': energy})


@dataclass
class LogSobolevPipelineReport:
    """Entropy against the λ-family of right-hand sides produced by the Gaussian-bubble target"""
    manifold: str
    function: str
    p: float
    entropy: float
    rows: List[Dict]
    limit: LimitEstimate
    theorem_rhs: float
    tolerance: float = QUOTIENT_TOL
    details: Dict = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return all(row['slack'] >= -self.tolerance for row in self.rows)

    @property
    def limit_deviation(self) -> float:
        return abs(self.limit.limit - self.theorem_rhs) / max(abs(self.theorem_rhs), 1.0)

    @property
    def passed(self) -> bool:
        return self.all_hold

    def as_dict(self) -> dict:
        return {
            'manifold': self.manifold,
            'function': self.function,
            'p': self.p,
            'entropy': self.entropy,
            'rows': self.rows,
            'limit': self.limit.as_dict(),
            'theorem_rhs': self.theorem_rhs,
            'limit_deviation': self.limit_deviation,
            'all_hold': self.all_hold,
            'details': self.details,
        }


def logsob_pipeline(manifold: RadialManifold, params: SobolevParams, f: RadialFunction,
                    grid: Optional[Sequence[float]] = None, auto_renormalize: bool = False,
                    n_jobs: int = 1, tol: float = DEFAULT_TOL,
                    slack_tol: float = QUOTIENT_TOL) -> LogSobolevPipelineReport:
    """
    Transport-derived entropy bounds for a compactly supported f with ∫f^p = 1

    For p > 1 the target is the Gaussian bubble e^{-λd^{p'}}/L₁ and the bound
        -λL₂/L₁ + n log(L₁^{-1/n} (C + (p/n) ‖∇f‖_p (L₂/L₁)^{1/p'}))
    with C = 1 + K₀ (p/n) ∫ f^{p-1} |∇f|, is extrapolated λ→0.
    For p = 1 the target is the uniform measure on B(λ) and the bound
        n log(Vol(B_λ)^{-1/n} + (K₀+λ)/(n Vol(B_λ)^{1/n}) ∫|∇f|)
    is extrapolated λ→∞. Both limits equal (n/p) log(L(n,p) AVR^{-p/n} ∫|∇f|^p).
    """
    n, p = params.n, params.p
    k0 = f.support_radius
    if not math.isfinite(k0):
        raise PreconditionError(f"{f.name} must be compactly supported for the transport bound")
    f = require_normalized(f, manifold, p, auto_renormalize, NORMALIZATION_TOL, tol=tol)

    entropy = _entropy(manifold, f, p, tol)
    energy = f.gradient_power(manifold, p, tol=tol).value
    theorem_rhs = (n / p) * math.log(log_sobolev_constant(n, p) * manifold.avr ** (-p / n) * energy)

    if params.is_endpoint:
        grid = default_large_grid() if grid is None else grid

        def bound(lam: float) -> float:
            volume = manifold.volume(lam)
            root = volume ** (1.0 / n)
            return n * math.log(1.0 / root + (k0 + lam) / (n * root) * energy)

        direction = TOWARD_INFINITY
        correction = 0.0
    else:
        grid = default_small_grid() if grid is None else grid
        pc = params.p_conj
        correction = radial_integral(manifold, lambda rho: abs(f(rho)) ** (p - 1.0) * abs(f.grad(rho)),
                                     tail=f.integrand_tail(p, n), tol=tol, scale=f.scale,
                                     points=f.breakpoints).value
        constant = 1.0 + k0 * (p / n) * correction
        gradient_norm = energy ** (1.0 / p)

        def bound(lam: float) -> float:
            l1, l2 = gaussian_L(manifold, params, lam, tol=tol)
            inner = l1 ** (-1.0 / n) * (constant + (p / n) * gradient_norm * (l2 / l1) ** (1.0 / pc))
            return -lam * l2 / l1 + n * math.log(inner)

        direction = TOWARD_ZERO

    values = sample_on_grid(lambda lam: (lam, bound(lam)), grid, n_jobs)
    rows = [{'lambda': lam, 'rhs': value, 'slack': value - entropy} for lam, value in values]
    limit = extrapolate_limit(values, direction)

    report = LogSobolevPipelineReport(manifold=manifold.label, function=f.name, p=p,
                                      entropy=entropy, rows=rows, limit=limit,
                                      theorem_rhs=theorem_rhs, tolerance=slack_tol,
                                      details={'K0': k0, 'gradient_p_norm_power': energy,
                                               'weighted_gradient': correction})
    logger.info(f"""
    Log-Sobolev pipeline on {manifold.label}:
    - Function: {f.name}, p={p}
    - Entropy: {entropy:.12g}
    - Extrapolated bound: {limit.limit:.12g} (theorem: {theorem_rhs:.12g})
    - All bounds hold: {report.all_hold}
    """)
    return report
