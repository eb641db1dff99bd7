"""Gaussian logarithmic-Sobolev inequality for the measure dγ_V = G_V^{-1} e^{-V} dv.

With a radial potential V(ρ) the hypothesis
    V - V'²/(2K) + (V'' + V' A'/A)/K - n <= C_V
is a one-dimensional condition, sampled on a grid, and

    ∫ h² log h² dγ_V <= (2/K) ∫ |h'|² dγ_V + log(K^{n/2} G_V e^{C_V} / ((2π)^{n/2} AVR))

for every h with ∫ h² dγ_V = 1. K = 1 is the unweighted form.
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import HypothesisViolationError, ParameterDomainError, PreconditionError
from src.core.geometry.manifold import RadialManifold, radial_integral
from src.core.inequalities.functions import RadialFunction
from src.core.inequalities.quotient import QUOTIENT_TOL, QuotientReport
from src.core.numerics.quadrature import DEFAULT_TOL, TailClass
from src.utils.logger import setup_logger

CONDITION_MARGIN = 1e-9
NORMALIZATION_TOL = 1e-8

logger = setup_logger('GaussianLSI')


@dataclass(frozen=True)
class PotentialSpec:
    """Radial potential V(ρ) with V', V'', the constant C_V, scale K and normalizer G_V = ∫e^{-V}dv"""
    name: str
    value: Callable[[float], float]
    derivative: Callable[[float], float]
    second_derivative: Callable[[float], float]
    c_v: float
    k: float
    g_v: float
    width: float = 1.0

    def weight(self, rho: float) -> float:
        return math.exp(-self.value(rho)) / self.g_v


def g_normalizer(manifold: RadialManifold, value: Callable[[float], float], width: float = 1.0,
                 tol: float = DEFAULT_TOL) -> float:
    """G_V = ∫_M e^{-V} dv"""
    g_v = radial_integral(manifold, lambda rho: math.exp(-value(rho)), tail=TailClass.exponential(),
                          tol=tol, scale=width).value
    if not g_v > 0.0 or not math.isfinite(g_v):
        raise ParameterDomainError(f"Potential normalizer must be finite and positive, got {g_v}")
    return g_v


def radial_potential(manifold: RadialManifold, name: str, value: Callable[[float], float],
                     derivative: Callable[[float], float],
                     second_derivative: Callable[[float], float], c_v: float = 0.0,
                     k: float = 1.0, width: float = 1.0, tol: float = DEFAULT_TOL) -> PotentialSpec:
    if not k > 0.0:
        raise ParameterDomainError(f"Potential scale K must be positive, got {k}")
    return PotentialSpec(name=name, value=value, derivative=derivative,
                         second_derivative=second_derivative, c_v=float(c_v), k=float(k),
                         g_v=g_normalizer(manifold, value, width=width, tol=tol), width=width)


def quadratic_potential(manifold: RadialManifold, k: float = 1.0,
                        tol: float = DEFAULT_TOL) -> PotentialSpec:
    """V_K = K d²/2, which satisfies the K-hypothesis with C_V = 0 under Ric >= 0"""
    if not k > 0.0:
        raise ParameterDomainError(f"Potential scale K must be positive, got {k}")
    return radial_potential(manifold, name=f"quadratic(K={k:g})",
                            value=lambda rho: 0.5 * k * rho * rho,
                            derivative=lambda rho: k * rho,
                            second_derivative=lambda rho: k,
                            c_v=0.0, k=k, width=1.0 / math.sqrt(k), tol=tol)


def default_condition_grid(potential: PotentialSpec, count: int = 400) -> np.ndarray:
    return np.geomspace(1e-4 * potential.width, 50.0 * potential.width, count)


def condition_values(manifold: RadialManifold, potential: PotentialSpec,
                     grid: Sequence[float]) -> np.ndarray:
    """V - V'²/(2K) + (V'' + V' A'/A)/K - n at each ρ"""
    rho = np.asarray(grid, dtype=float)
    k = potential.k
    v = np.array([potential.value(r) for r in rho])
    dv = np.array([potential.derivative(r) for r in rho])
    d2v = np.array([potential.second_derivative(r) for r in rho])
    laplacian = d2v + dv * np.asarray(manifold.log_area_derivative(rho), dtype=float)
    return v - dv * dv / (2.0 * k) + laplacian / k - manifold.n


def check_potential_condition(manifold: RadialManifold, potential: PotentialSpec,
                              grid: Optional[Sequence[float]] = None,
                              margin: float = CONDITION_MARGIN) -> Tuple[float, float]:
    """
    Largest sampled value of the hypothesis expression and where it occurs

    Raises:
        HypothesisViolationError: the expression exceeds C_V + margin somewhere on the grid
    """
    grid = default_condition_grid(potential) if grid is None else np.asarray(grid, dtype=float)
    values = condition_values(manifold, potential, grid)
    worst = int(np.argmax(values))
    worst_value, worst_rho = float(values[worst]), float(grid[worst])
    if worst_value > potential.c_v + margin * max(1.0, abs(potential.c_v)):
        raise HypothesisViolationError(
            f"Potential {potential.name} violates the curvature-drift condition at ρ={worst_rho:.6g}: "
            f"{worst_value:.6g} > C_V = {potential.c_v:.6g}",
            details={'worst_rho': worst_rho, 'value': worst_value, 'c_v': potential.c_v})
    return worst_value, worst_rho


def _gaussian_moment(manifold: RadialManifold, potential: PotentialSpec,
                     integrand: Callable[[float], float], tol: float) -> float:
    """∫ integrand dγ_V"""
    return radial_integral(manifold, lambda rho: integrand(rho) * potential.weight(rho),
                           tail=TailClass.exponential(), tol=tol, scale=potential.width).value


def gaussian_lsi_check(manifold: RadialManifold, potential: PotentialSpec, h: RadialFunction,
                       grid: Optional[Sequence[float]] = None, auto_renormalize: bool = False,
                       norm_tol: float = NORMALIZATION_TOL, tol: float = DEFAULT_TOL,
                       slack_tol: float = QUOTIENT_TOL) -> QuotientReport:
    """
    Both sides of the Gaussian log-Sobolev inequality for h with ∫h² dγ_V = 1

    The report's sharp_bound is the additive constant
    log(K^{n/2} G_V e^{C_V} / ((2π)^{n/2} AVR)); details carry the
    dimension-free form with -log AVR in its place.

    Raises:
        HypothesisViolationError: the potential fails its hypothesis on the grid
        PreconditionError: h is not normalized and auto_renormalize is off
    """
    n, k = manifold.n, potential.k
    worst_value, worst_rho = check_potential_condition(manifold, potential, grid)

    mass = _gaussian_moment(manifold, potential, lambda rho: h(rho) ** 2, tol)
    if abs(mass - 1.0) > norm_tol:
        if not auto_renormalize:
            raise PreconditionError(f"{h.name} is not normalized in L²(γ_V): mass {mass:.12g}",
                                    details={'mass': mass, 'tolerance': norm_tol})
        h = h.scaled(mass ** -0.5)

    def entropy_density(rho: float) -> float:
        v = h(rho) ** 2
        return v * math.log(v) if v > 0.0 else 0.0

    lhs = _gaussian_moment(manifold, potential, entropy_density, tol)
    energy = _gaussian_moment(manifold, potential, lambda rho: h.grad(rho) ** 2, tol)

    additive = (0.5 * n * math.log(k) + math.log(potential.g_v) + potential.c_v
                - 0.5 * n * math.log(2.0 * math.pi) - math.log(manifold.avr))
    rhs = (2.0 / k) * energy + additive
    dimension_free = -math.log(manifold.avr)

    report = QuotientReport(inequality='gaussian-lsi', manifold=manifold.label, function=h.name,
                            lhs=lhs, rhs=rhs, ratio=None, sharp_bound=additive, slack=rhs - lhs,
                            tolerance=slack_tol, diagnostic=manifold.is_diagnostic,
                            details={'potential': potential.name, 'K': k, 'C_V': potential.c_v,
                                     'G_V': potential.g_v, 'gradient_energy': energy,
                                     'condition_max': worst_value, 'condition_worst_rho': worst_rho,
                                     'dimension_free_constant': dimension_free,
                                     'dimension_free_slack': (2.0 / k) * energy + dimension_free - lhs})
    logger.debug(f"Gaussian LSI of {h.name} under {potential.name} on {manifold.label}: "
                 f"lhs={lhs:.12g}, rhs={rhs:.12g}, additive={additive:.12g}")
    return report
