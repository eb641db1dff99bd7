import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.core.errors import InsufficientDataError, PreconditionError
from src.core.geometry.manifold import RadialManifold
from src.core.transport.measures import RadialMeasure, polynomial_bump_measure
from src.core.transport.solver import (TransportInstance, solve_radial_transport,
                                       transport_point)
from src.utils.logger import setup_logger

DETERMINANT_TRACE_TOL = 1e-8
MONGE_AMPERE_TOL = 1e-8
CAMPAIGN_NODES = 512
# Each grid doubling must cut the residual by this factor unless the finer residual is at the floor.
REFINEMENT_FACTOR = 4.0
RESIDUAL_FLOOR = 1e-12

logger = setup_logger('TransportChecks')


def push_forward_error(inst: TransportInstance) -> float:
    """max |F_src(ρ) - F_tgt(T(ρ))| over the grid, using right masses above the median"""
    worst = 0.0
    for rho, t in zip(inst.rho, inst.T):
        left = inst.source.cdf(float(rho))
        if left <= 0.5:
            error = abs(left - inst.target.cdf(float(t)))
        else:
            error = abs(inst.source.sf(float(rho)) - inst.target.sf(float(t)))
        worst = max(worst, error)
    return worst


def monge_ampere_residual(inst: TransportInstance) -> float:
    """max |φ_src(ρ) - φ_tgt(T(ρ)) J(ρ)| over resolved nodes, relative to max φ_src"""
    mask = inst.resolved
    source = np.asarray(inst.source.density(inst.rho[mask]), dtype=float)
    target = np.asarray(inst.target.density(inst.T[mask]), dtype=float)
    return float(np.max(np.abs(source - target * inst.jacobian[mask])) / np.max(source))


@dataclass
class DeterminantTraceReport:
    """Per-node comparison of J^{1/n} with 1 - Δu/n"""
    manifold: str
    source: str
    target: str
    min_slack: float
    worst_rho: float
    violations: int
    tolerance: float
    diagnostic: bool
    rows: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    @property
    def status(self) -> str:
        if self.passed:
            return 'OK'
        return 'WARNING' if self.diagnostic else 'ERROR'

    def as_dict(self) -> dict:
        return {
            'manifold': self.manifold,
            'source': self.source,
            'target': self.target,
            'min_slack': self.min_slack,
            'worst_rho': self.worst_rho,
            'violations': self.violations,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'status': self.status,
            'diagnostic': self.diagnostic,
            'rows': self.rows,
        }


def determinant_trace_check(inst: TransportInstance,
                            tol: float = DETERMINANT_TRACE_TOL) -> DeterminantTraceReport:
    """
    slack(ρ) = (1 - Δu(ρ)/n) - J(ρ)^{1/n} on the resolved nodes

    Negative slack beyond tol counts as a violation; on table profiles the
    violations are diagnostic.
    """
    n = inst.manifold.n
    mask = inst.resolved
    rho = inst.rho[mask]
    with np.errstate(invalid='ignore'):
        lhs = np.power(inst.jacobian[mask], 1.0 / n)
    rhs = 1.0 - inst.laplacian[mask] / n
    slack = rhs - lhs
    slack = np.where(np.isfinite(slack), slack, -math.inf)

    worst = int(np.argmin(slack))
    violations = int(np.sum(slack < -tol))
    rows = [{'rho': float(r), 'lhs': float(a), 'rhs': float(b), 'slack': float(s)}
            for r, a, b, s in zip(rho, lhs, rhs, slack)]
    report = DeterminantTraceReport(manifold=inst.manifold.label, source=inst.source.name,
                                    target=inst.target.name, min_slack=float(slack[worst]),
                                    worst_rho=float(rho[worst]), violations=violations,
                                    tolerance=tol, diagnostic=inst.manifold.is_diagnostic, rows=rows)
    if violations:
        logger.warning(f"""
        Determinant-trace violations:
        Manifold: {inst.manifold.label}
        Instance: {inst.source.name} -> {inst.target.name}
        Violating nodes: {violations}
        Minimum slack: {report.min_slack:.3e} at ρ={report.worst_rho:.6g}
        """)
    return report


def composition_check(manifold: RadialManifold, first: RadialMeasure, second: RadialMeasure,
                      nodes: int = 1024) -> float:
    """
    Largest relative deviation of T_BA(T_AB(ρ)) from ρ on the resolved nodes

    Raises:
        PreconditionError: either measure lacks compact support
    """
    if not (first.is_compact and second.is_compact):
        raise PreconditionError("Composition check needs two compactly supported measures")
    forward = solve_radial_transport(manifold, first, second, nodes=nodes)
    worst = 0.0
    for rho, t in zip(forward.rho[forward.resolved], forward.T[forward.resolved]):
        back = transport_point(second, first, float(t))
        worst = max(worst, abs(back - rho) / rho)
    return worst


def _random_pair(manifold: RadialManifold, rng: np.random.Generator):
    exponent = float(rng.uniform(2.0, 4.0))
    radii = rng.uniform(0.5, 2.0, size=2)
    coeffs = rng.uniform(-0.3, 0.3, size=(2, 2))
    source = polynomial_bump_measure(manifold, float(radii[0]), exponent, coeffs[0])
    target = polynomial_bump_measure(manifold, float(radii[1]), exponent, coeffs[1])
    return source, target


def random_instance_campaign(manifold: RadialManifold, count: int = 100, seed: int = 0,
                             nodes: int = CAMPAIGN_NODES, n_jobs: int = 1,
                             tol: float = DETERMINANT_TRACE_TOL) -> List[DeterminantTraceReport]:
    """
    Determinant-trace reports for randomized smooth compactly supported pairs

    Source and target share the vanishing order at the boundary of their
    supports, so T stays smooth up to the edge.
    """
    rng = np.random.default_rng(seed)
    pairs = [_random_pair(manifold, rng) for _ in range(int(count))]

    def run(pair) -> DeterminantTraceReport:
        source, target = pair
        inst = solve_radial_transport(manifold, source, target, nodes=nodes)
        return determinant_trace_check(inst, tol=tol)

    logger.info(f"""
    === Determinant-trace campaign START ===
    Manifold: {manifold.label}
    Instances: {count}, seed {seed}, nodes {nodes}
    """)
    if n_jobs == 1:
        reports = [run(pair) for pair in pairs]
    else:
        reports = Parallel(n_jobs=n_jobs, prefer='threads')(delayed(run)(pair) for pair in pairs)
    failures = sum(1 for r in reports if not r.passed)
    logger.info(f"""
    === Determinant-trace campaign END ===
    Minimum slack: {min(r.min_slack for r in reports):.3e}
    Failed instances: {failures}/{count}
    """)
    return reports


@dataclass
class RefinementReport:
    """Monge-Ampère residual against grid size"""
    manifold: str
    rows: List[Dict]
    observed_order: float
    diagnostic: bool = False

    @property
    def reduction_factors(self) -> List[float]:
        residuals = [row['residual'] for row in self.rows]
        return [a / b if b > 0.0 else math.inf for a, b in zip(residuals, residuals[1:])]

    @property
    def passed(self) -> bool:
        finer = [row['residual'] for row in self.rows[1:]]
        return all(factor >= REFINEMENT_FACTOR or residual <= RESIDUAL_FLOOR
                   for factor, residual in zip(self.reduction_factors, finer))

    @property
    def status(self) -> str:
        if self.passed:
            return 'OK'
        return 'WARNING' if self.diagnostic else 'ERROR'

    def as_dict(self) -> dict:
        return {
            'manifold': self.manifold,
            'rows': self.rows,
            'observed_order': self.observed_order,
            'reduction_factors': self.reduction_factors,
            'passed': self.passed,
            'status': self.status,
        }


def refinement_study(manifold: RadialManifold, source: RadialMeasure, target: RadialMeasure,
                     nodes: Sequence[int] = (256, 512, 1024)) -> RefinementReport:
    """Residual at each grid size and the observed order in the log-grid spacing"""
    nodes = sorted(int(k) for k in nodes)
    if len(nodes) < 2:
        raise InsufficientDataError("Refinement study needs at least two grid sizes")
    rows = []
    for count in nodes:
        inst = solve_radial_transport(manifold, source, target, nodes=count)
        spacing = float(np.log(inst.rho[1] / inst.rho[0]))
        rows.append({'nodes': count, 'spacing': spacing, 'residual': monge_ampere_residual(inst)})

    positive = [row for row in rows if row['residual'] > 0.0]
    if len(positive) >= 2:
        slope = np.polyfit(np.log([r['spacing'] for r in positive]),
                           np.log([r['residual'] for r in positive]), 1)[0]
        order = float(slope)
    else:
        order = math.inf
    logger.info(f"Refinement study on {manifold.label}: observed order {order:.3g}")
    return RefinementReport(manifold=manifold.label, rows=rows, observed_order=order,
                            diagnostic=manifold.is_diagnostic)
