"""Numerical replay of the transport proof of the sharp Sobolev inequality.

Each link of the chain

    ∫ν^{1-1/n} = ∫ f^α J^{1/n} <= ∫ f^α (1 - Δu/n)
               = ∫ f^α + (α/n) ∫ f^{α-1} φ' u'
              <= ∫ f^α + (α/n) ∫ f^{α-1} |φ'| |u'|
              <= C(f) + (α/n) ∫ f^{α-1} |φ'| T
              <= final bound

is evaluated by adaptive quadrature along the source support, with T from
cumulative-mass matching at every abscissa and T' from the mass balance
φ_src(ρ)A(ρ) = φ_tgt(T)A(T)T'. Here α = p★(1 - 1/n). The grid instance
of the same pair supplies the Monge-Ampère residual and the
determinant-trace slack.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.core.bubbles.asymptotics import default_large_grid
from src.core.bubbles.functionals import BubbleQuery, ckn_K, talenti_H, truncation
from src.core.constants import SobolevParams, aubin_talenti, sobolev_exponents
from src.core.errors import ConvergenceError, ParameterDomainError, PreconditionError
from src.core.geometry.manifold import RadialManifold, radial_integral
from src.core.inequalities.functions import RadialFunction, require_normalized
from src.core.numerics.extrapolation import (TOWARD_INFINITY, LimitEstimate, extrapolate_limit,
                                             sample_on_grid)
from src.core.numerics.quadrature import DEFAULT_TOL, TailClass
from src.core.transport.checks import determinant_trace_check, monge_ampere_residual
from src.core.transport.measures import (RadialMeasure, bubble_measure, function_measure,
                                         uniform_ball)
from src.core.transport.solver import DEFAULT_NODES, solve_radial_transport, transport_point
from src.utils.logger import setup_logger

CHAIN_TOL = 1e-7
NORMALIZATION_TOL = 1e-8
LINK_RTOL = 1e-10
# Right-tail source mass below which the integrands are treated as zero. Abscissae
# whose image lands where the target density has underflowed to zero are dropped too.
TAIL_UNDERFLOW = 1e-250

logger = setup_logger('ProofPipeline')


@dataclass
class PipelineReport:
    """Values of every link of the proof chain and the verdict on each '<='"""
    pipeline: str
    manifold: str
    function: str
    parameters: Dict
    links: List[Dict]
    checks: List[Dict]
    final_lhs: float
    final_rhs: float
    extracted_constant: float
    monge_ampere_residual: Optional[float] = None
    determinant_trace_min_slack: Optional[float] = None
    tolerance: float = CHAIN_TOL
    diagnostic: bool = False
    extras: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check['holds'] for check in self.checks)

    @property
    def status(self) -> str:
        if self.passed:
            return 'OK'
        return 'WARNING' if self.diagnostic else 'ERROR'

    def link(self, name: str) -> float:
        for entry in self.links:
            if entry['name'] == name:
                return entry['value']
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            'pipeline': self.pipeline,
            'manifold': self.manifold,
            'function': self.function,
            'parameters': self.parameters,
            'links': self.links,
            'checks': self.checks,
            'final_lhs': self.final_lhs,
            'final_rhs': self.final_rhs,
            'extracted_constant': self.extracted_constant,
            'monge_ampere_residual': self.monge_ampere_residual,
            'determinant_trace_min_slack': self.determinant_trace_min_slack,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'status': self.status,
            'diagnostic': self.diagnostic,
            'extras': self.extras,
        }


def _check(lhs_name: str, lhs: float, rhs_name: str, rhs: float, tol: float) -> Dict:
    gap = rhs - lhs
    holds = gap >= -tol * max(abs(lhs), abs(rhs), 1.0)
    return {'lhs': lhs_name, 'rhs': rhs_name, 'lhs_value': lhs, 'rhs_value': rhs,
            'gap': gap, 'holds': bool(holds)}


def _chain_checks(links: List[Tuple[str, float]], tol: float) -> List[Dict]:
    return [_check(a, x, b, y, tol) for (a, x), (b, y) in zip(links, links[1:])]


def _transport_integrals(manifold: RadialManifold, f: RadialFunction, source: RadialMeasure,
                         target: RadialMeasure, alpha: float) -> np.ndarray:
    """
    ∫ over the source support of, in order,
    f^α J^{1/n}, f^α (1 - Δu/n), f^{α-1} φ' u', f^{α-1} |φ'| |u'|, f^{α-1} |φ'| T
    """
    n = manifold.n

    def integrand(rho: float) -> np.ndarray:
        if rho <= 0.0 or source.sf(rho) < TAIL_UNDERFLOW:
            return np.zeros(5)
        t = transport_point(source, target, rho)
        value = f(rho)
        if value <= 0.0:
            return np.zeros(5)
        target_density = target.density(t)
        if not target_density > 0.0:
            return np.zeros(5)
        area, area_t = manifold.area(rho), manifold.area(t)
        t_prime = source.density(rho) * area / (target_density * area_t)
        if not math.isfinite(t_prime):
            return np.zeros(5)
        jacobian = t_prime * area_t / area
        laplacian = 1.0 - t_prime + manifold.log_area_derivative(rho) * (rho - t)
        fa = value ** alpha
        weight = value ** (alpha - 1.0) * f.grad(rho)
        u = rho - t
        return area * np.array([fa * jacobian ** (1.0 / n), fa * (1.0 - laplacian / n),
                                weight * u, abs(weight) * abs(u), abs(weight) * t])

    points = [b for b in f.breakpoints if 0.0 < b < source.support] or None
    result, error = integrate.quad_vec(integrand, 0.0, source.support, epsrel=LINK_RTOL,
                                       norm='max', points=points)
    if not np.all(np.isfinite(result)):
        raise ConvergenceError("Transport link integrals did not converge",
                               details={'values': [float(v) for v in result]})
    return np.asarray(result, dtype=float)


def _source_integrals(manifold: RadialManifold, f: RadialFunction, alpha: float,
                      tol: float) -> Tuple[float, float, float]:
    """∫ f^α, ∫ f^{α-1}|φ'| and ∫ |φ'| over the support of f"""
    radius = f.support_radius
    tail = TailClass.compact(radius)
    points = list(f.breakpoints)
    mass = radial_integral(manifold, lambda rho: abs(f(rho)) ** alpha, tail=tail, tol=tol,
                           scale=f.scale, points=points).value
    weighted = radial_integral(manifold, lambda rho: abs(f(rho)) ** (alpha - 1.0) * abs(f.grad(rho)),
                               tail=tail, tol=tol, scale=f.scale, points=points).value
    total_variation = radial_integral(manifold, lambda rho: abs(f.grad(rho)), tail=tail, tol=tol,
                                      scale=f.scale, points=points).value
    return mass, weighted, total_variation


def _instance_diagnostics(manifold: RadialManifold, source: RadialMeasure, target: RadialMeasure,
                          nodes: Optional[int]) -> Tuple[Optional[float], Optional[float]]:
    if not nodes:
        return None, None
    inst = solve_radial_transport(manifold, source, target, nodes=nodes)
    return monge_ampere_residual(inst), determinant_trace_check(inst).min_slack


def bubble_integrals(manifold: RadialManifold, params: SobolevParams, lam: float,
                     k: Optional[float] = None, tol: float = DEFAULT_TOL) -> Dict[str, float]:
    """
    I = ∫P_kG, ∫(P_kG)^{1-1/n} and ∫P_kG d^{p'} for G = (λ + d^{p'})^{-n}

    Untruncated they are H(λ, n), H(λ, n-1) and K(λ, p', p', n).
    """
    n, pc = manifold.n, params.p_conj
    if k is None or math.isinf(k):
        return {
            'I': talenti_H(BubbleQuery(manifold, params, lam, s=n), tol=tol),
            'power_mass': talenti_H(BubbleQuery(manifold, params, lam, s=n - 1), tol=tol),
            'moment': ckn_K(manifold, lam, pc, pc, n, tol=tol),
        }
    tail = TailClass.compact(k + 1.0)
    scale = min(lam ** (1.0 / pc), k)

    def cut_bubble(rho: float, power: float) -> float:
        return truncation(k, rho) ** power * (lam + rho ** pc) ** (-n * power)

    return {
        'I': talenti_H(BubbleQuery(manifold, params, lam, s=n), k=k, tol=tol),
        'power_mass': radial_integral(manifold, lambda rho: cut_bubble(rho, 1.0 - 1.0 / n), tail=tail,
                                      tol=tol, scale=scale, points=[k]).value,
        'moment': radial_integral(manifold, lambda rho: cut_bubble(rho, 1.0) * rho ** pc, tail=tail,
                                  tol=tol, scale=scale, points=[k]).value,
    }


def extracted_sobolev_constant(manifold: RadialManifold, params: SobolevParams, lam: float,
                               k: Optional[float] = None, tol: float = DEFAULT_TOL) -> float:
    """
    (p★(n-1)/n²) (∫G d^{p'})^{1/p'} / (I^{1/n-1/p} ∫G^{1-1/n})

    The constant the final bound attributes to ‖∇f‖_p; equal to
    AT(n,p) AVR^{-1/n} at every λ on cones.
    """
    n, p, pc, p_star = params.n, params.p, params.p_conj, params.p_star
    b = bubble_integrals(manifold, params, lam, k=k, tol=tol)
    coefficient = p_star * (n - 1.0) / n ** 2
    return coefficient * b['moment'] ** (1.0 / pc) / (b['I'] ** (1.0 / n - 1.0 / p) * b['power_mass'])


def proof_pipeline_p_gt_1(manifold: RadialManifold, params: SobolevParams, f: RadialFunction,
                          lam: float, k: Optional[float] = None, nodes: Optional[int] = DEFAULT_NODES,
                          auto_renormalize: bool = False, tol: float = DEFAULT_TOL,
                          chain_tol: float = CHAIN_TOL) -> PipelineReport:
    """
    Transport f^{p★} onto the Talentian bubble P_kG_λ/I and evaluate the chain

    Args:
        manifold: Radial model
        params: Exponents with 1 < p < n
        f: Compactly supported test function with ∫ f^{p★} = 1
        lam: Bubble parameter λ
        k: Truncation level, None for the untruncated bubble
        nodes: Grid size of the diagnostic instance; 0 or None skips it

    Raises:
        PreconditionError: f not normalized or not compactly supported
    """
    if params.is_endpoint:
        raise ParameterDomainError("Use proof_pipeline_p_eq_1 for p = 1")
    n, p, pc, p_star = params.n, params.p, params.p_conj, params.p_star
    k0 = f.support_radius
    if not math.isfinite(k0):
        raise PreconditionError(f"{f.name} must be compactly supported")
    f = require_normalized(f, manifold, p_star, auto_renormalize, NORMALIZATION_TOL, tol=tol)
    alpha = p_star * (1.0 - 1.0 / n)

    logger.info(f"""
    === Proof pipeline (p > 1) START ===
    Manifold: {manifold.label}
    Function: {f.name}
    p={p}, λ={lam:g}, k={k if k is not None else 'inf'}
    """)
    source = function_measure(manifold, f, p_star)
    target = bubble_measure(manifold, params, lam, k)
    target.check_invertible()

    b = bubble_integrals(manifold, params, lam, k=k, tol=tol)
    mass_alpha, weighted, _ = _source_integrals(manifold, f, alpha, tol)
    energy = f.gradient_power(manifold, p, tol=tol).value
    gradient_norm = energy ** (1.0 / p)
    c_f = mass_alpha + k0 * (alpha / n) * weighted
    coefficient = alpha / n

    cov, trace, divergence, schwarz, split = _transport_integrals(manifold, f, source, target, alpha)
    links = [
        ('transported_bubble', b['I'] ** (1.0 / n - 1.0) * b['power_mass']),
        ('change_of_variables', cov),
        ('determinant_trace', trace),
        ('divergence', mass_alpha + coefficient * divergence),
        ('cauchy_schwarz', mass_alpha + coefficient * schwarz),
        ('support_split', c_f + coefficient * split),
        ('holder', c_f + coefficient * gradient_norm * (b['moment'] / b['I']) ** (1.0 / pc)),
    ]
    checks = _chain_checks(links, chain_tol)

    final_lhs = b['I'] ** (1.0 / n - 1.0 / p) * b['power_mass']
    final_rhs = c_f * b['I'] ** (1.0 / pc) + coefficient * b['moment'] ** (1.0 / pc) * gradient_norm
    checks.append(_check('final_lhs', final_lhs, 'final_rhs', final_rhs, chain_tol))
    extracted = coefficient * b['moment'] ** (1.0 / pc) / final_lhs

    residual, min_slack = _instance_diagnostics(manifold, source, target, nodes)
    report = PipelineReport(pipeline='sobolev-p>1', manifold=manifold.label, function=f.name,
                            parameters={'n': n, 'p': p, 'lambda': lam, 'k': k, 'K0': k0},
                            links=[{'name': name, 'value': float(value)} for name, value in links],
                            checks=checks, final_lhs=final_lhs, final_rhs=final_rhs,
                            extracted_constant=extracted, monge_ampere_residual=residual,
                            determinant_trace_min_slack=min_slack, tolerance=chain_tol,
                            diagnostic=manifold.is_diagnostic,
                            extras={'C_f': c_f, 'gradient_norm': gradient_norm, **b})
    logger.info(f"""
    === Proof pipeline (p > 1) END ===
    Final: {final_lhs:.12g} <= {final_rhs:.12g}
    Extracted constant: {extracted:.12g}
    Status: {report.status}
    """)
    return report


def truncation_study(manifold: RadialManifold, params: SobolevParams, f: RadialFunction, lam: float,
                     levels: Sequence[float] = (5.0, 10.0, 20.0),
                     nodes: Optional[int] = None) -> List[PipelineReport]:
    """Pipeline reports at each truncation level, followed by the untruncated one"""
    return [proof_pipeline_p_gt_1(manifold, params, f, lam, k=k, nodes=nodes)
            for k in list(levels) + [None]]


@dataclass
class SharpnessExtraction:
    """Extracted Sobolev constant along a λ-grid and its λ→∞ limit"""
    manifold: str
    rows: List[Dict]
    limit: LimitEstimate
    predicted: float

    @property
    def relative_deviation(self) -> float:
        return abs(self.limit.limit - self.predicted) / self.predicted

    def as_dict(self) -> dict:
        return {
            'manifold': self.manifold,
            'rows': self.rows,
            'limit': self.limit.as_dict(),
            'predicted': self.predicted,
            'relative_deviation': self.relative_deviation,
        }


def pipeline_sharpness(manifold: RadialManifold, params: SobolevParams,
                       grid: Optional[Sequence[float]] = None, k: Optional[float] = None,
                       n_jobs: int = 1) -> SharpnessExtraction:
    """Extrapolate the extracted constant as λ→∞ against AT(n,p) AVR^{-1/n}"""
    grid = default_large_grid() if grid is None else grid
    samples = sample_on_grid(lambda lam: (lam, extracted_sobolev_constant(manifold, params, lam, k=k)),
                             grid, n_jobs)
    limit = extrapolate_limit(samples, TOWARD_INFINITY)
    predicted = aubin_talenti(params.n, params.p) * manifold.avr ** (-1.0 / params.n)
    return SharpnessExtraction(manifold=manifold.label,
                               rows=[{'lambda': lam, 'constant': value} for lam, value in samples],
                               limit=limit, predicted=predicted)


def proof_pipeline_p_eq_1(manifold: RadialManifold, f: RadialFunction, lam: float,
                          grid: Optional[Sequence[float]] = None,
                          nodes: Optional[int] = DEFAULT_NODES, auto_renormalize: bool = False,
                          tol: float = DEFAULT_TOL, chain_tol: float = CHAIN_TOL) -> PipelineReport:
    """
    Transport f^{n/(n-1)} onto the uniform measure of B(λ)

    Verifies Vol(B_λ)^{1/n} <= ∫f + (K₀+λ)/n ∫|φ'| link by link, then divides
    by λ along the grid and extrapolates both sides as λ→∞, where they tend
    to (ω_n AVR)^{1/n} and (1/n)∫|φ'|.
    """
    n = manifold.n
    params = sobolev_exponents(n, 1.0)
    k0 = f.support_radius
    if not math.isfinite(k0):
        raise PreconditionError(f"{f.name} must be compactly supported")
    f = require_normalized(f, manifold, params.p_star, auto_renormalize, NORMALIZATION_TOL, tol=tol)

    logger.info(f"""
    === Proof pipeline (p = 1) START ===
    Manifold: {manifold.label}
    Function: {f.name}
    Ball radius λ={lam:g}
    """)
    source = function_measure(manifold, f, params.p_star)
    target = uniform_ball(manifold, lam)

    mass, _, total_variation = _source_integrals(manifold, f, 1.0, tol)
    cov, trace, divergence, schwarz, split = _transport_integrals(manifold, f, source, target, 1.0)
    volume_root = manifold.volume(lam) ** (1.0 / n)
    final_rhs = mass + (k0 + lam) / n * total_variation
    links = [
        ('transported_ball', volume_root),
        ('change_of_variables', cov),
        ('determinant_trace', trace),
        ('divergence', mass + divergence / n),
        ('cauchy_schwarz', mass + schwarz / n),
        ('support_split', mass + k0 / n * total_variation + split / n),
        ('ball_radius', final_rhs),
    ]
    checks = _chain_checks(links, chain_tol)
    checks.append(_check('final_lhs', volume_root, 'final_rhs', final_rhs, chain_tol))

    grid = default_large_grid(8) if grid is None else grid
    lhs_samples = [(float(r), manifold.volume(float(r)) ** (1.0 / n) / float(r)) for r in grid]
    rhs_samples = [(float(r), (mass + (k0 + float(r)) / n * total_variation) / float(r)) for r in grid]
    lhs_limit = extrapolate_limit(lhs_samples, TOWARD_INFINITY)
    rhs_limit = extrapolate_limit(rhs_samples, TOWARD_INFINITY)
    predicted_lhs = (manifold.omega * manifold.avr) ** (1.0 / n)
    predicted_rhs = total_variation / n
    checks.append(_check('isoperimetric_limit', lhs_limit.limit, 'gradient_limit', rhs_limit.limit,
                         chain_tol))

    residual, min_slack = _instance_diagnostics(manifold, source, target, nodes)
    report = PipelineReport(pipeline='sobolev-p=1', manifold=manifold.label, function=f.name,
                            parameters={'n': n, 'p': 1.0, 'lambda': lam, 'K0': k0},
                            links=[{'name': name, 'value': float(value)} for name, value in links],
                            checks=checks, final_lhs=volume_root, final_rhs=final_rhs,
                            extracted_constant=1.0 / (n * lhs_limit.limit),
                            monge_ampere_residual=residual, determinant_trace_min_slack=min_slack,
                            tolerance=chain_tol, diagnostic=manifold.is_diagnostic,
                            extras={'divided_rows': [{'lambda': r, 'lhs': a, 'rhs': b}
                                                     for (r, a), (_, b) in zip(lhs_samples, rhs_samples)],
                                    'lhs_limit': lhs_limit.as_dict(),
                                    'rhs_limit': rhs_limit.as_dict(),
                                    'predicted_lhs_limit': predicted_lhs,
                                    'predicted_rhs_limit': predicted_rhs,
                                    'total_variation': total_variation})
    logger.info(f"""
    === Proof pipeline (p = 1) END ===
    Final: {volume_root:.12g} <= {final_rhs:.12g}
    Limits: {lhs_limit.limit:.12g} <= {rhs_limit.limit:.12g}
    Status: {report.status}
    """)
    return report
