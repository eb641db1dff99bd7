import traceback
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from src.core.bubbles.asymptotics import (verify_H_asymptotic, verify_K_asymptotic,
                                          verify_L_asymptotics, verify_L_ratio)
from src.core.config_manager import RunConfig
from src.core.constants import (aubin_talenti, ckn_constants, log_sobolev_constant,
                                log_sobolev_exponents, sobolev_exponents, volume_unit_ball)
from src.core.errors import LabError
from src.core.geometry.manifold import (RadialManifold, construct_manifold, parse_manifold_spec,
                                        validate_bishop_gromov)
from src.core.inequalities.functions import mollified_ball_indicator, normalize, smooth_bump
from src.core.inequalities.isoperimetric import isoperimetric_check
from src.core.inequalities.noncollapse import noncollapse_check
from src.core.numerics.extrapolation import geometric_grid
from src.core.transport.checks import (MONGE_AMPERE_TOL, determinant_trace_check,
                                       monge_ampere_residual, random_instance_campaign,
                                       refinement_study)
from src.core.transport.measures import polynomial_bump_measure
from src.core.transport.pipelines import proof_pipeline_p_eq_1, proof_pipeline_p_gt_1
from src.core.transport.solver import solve_radial_transport
from src.scans.providers.manager import (ckn_sharpness_scan, logsob_sharpness_scan,
                                         sobolev_sharpness_scan)
from src.utils.logger import setup_logger

STATUS_ORDER = ('OK', 'WARNING', 'ERROR')
CONSTANT_TABLE_EXPONENTS = (1.0, 1.5, 2.0, 3.0)
GEOMETRY_GRID = (1e-3, 1e4, 200)
REFINEMENT_NODES = (256, 512, 1024)


def worst_status(statuses) -> str:
    statuses = list(statuses) or ['OK']
    return max(statuses, key=STATUS_ORDER.index)


def report_status(report: Any) -> str:
    """Status of a report object, derived from its passed flag when it has no status"""
    status = getattr(report, 'status', None)
    if status in STATUS_ORDER:
        return status
    passed = getattr(report, 'passed', True)
    return 'OK' if passed else 'ERROR'


@dataclass
class AuditResult:
    """Outcome of one lab experiment"""
    module_name: str
    status: str  # 'OK', 'WARNING', 'ERROR'
    message: str
    details: Optional[Dict] = None
    reports: Dict[str, Any] = field(default_factory=dict)
    invalid_input: bool = False

    def as_dict(self) -> dict:
        return {
            'module_name': self.module_name,
            'status': self.status,
            'message': self.message,
            'details': self.details,
            'invalid_input': self.invalid_input,
            'reports': self.reports,
        }


class LabAuditor:
    """Runs the lab experiments of one RunConfig and collects AuditResults"""

    def __init__(self, config: RunConfig):
        """Initialize Lab Auditor"""
        self.config = config
        self._setup_logging()
        self.results: List[AuditResult] = []
        self._manifold: Optional[RadialManifold] = None

    def _setup_logging(self):
        self.logger = setup_logger('LabAuditor')

    @property
    def manifold(self) -> RadialManifold:
        if self._manifold is None:
            spec = parse_manifold_spec(self.config.manifold, self.config.n,
                                       tail_exponent_hint=self.config.tail_exponent_hint)
            self._manifold = construct_manifold(spec)
        return self._manifold

    def _lambda_grid(self, default_min: float, default_max: float) -> np.ndarray:
        lo, hi = self.config.lambda_grid_bounds(default_min, default_max)
        return geometric_grid(lo, hi, self.config.lambda_count)

    def _geometry_grid(self) -> np.ndarray:
        lo, hi, count = GEOMETRY_GRID
        return np.geomspace(lo, hi, count)

    def _residual_status(self, residual: Optional[float]) -> str:
        if residual is None or residual <= MONGE_AMPERE_TOL:
            return 'OK'
        return 'WARNING' if self.manifold.is_diagnostic else 'ERROR'

    def _run(self, name: str, experiment: Callable[[], AuditResult]) -> AuditResult:
        """Run one experiment; any raised error becomes an ERROR result, flagged when the inputs caused it"""
        self.logger.info(f"""
        ================ AUDIT START ================
        Experiment: {name}
        Manifold spec: {self.config.manifold} (n={self.config.n})
        """)
        try:
            result = experiment()
        except LabError as e:
            self.logger.error(f"""
            Experiment Error:
            Experiment: {name}
            Error: {str(e)}
            Traceback: {traceback.format_exc()}
            """)
            result = AuditResult(module_name=name, status='ERROR', message=str(e),
                                 details={'error': type(e).__name__, **e.details},
                                 invalid_input=e.invalid_input)
        except Exception as e:
            self.logger.error(f"Unexpected error during {name}: {str(e)}", exc_info=True)
            result = AuditResult(module_name=name, status='ERROR',
                                 message=f"Unexpected error: {str(e)}",
                                 details={'error': type(e).__name__})
        self.results.append(result)
        self.logger.info(f"""
        ================ AUDIT END ================
        Experiment: {name}
        Status: {result.status}
        Message: {result.message}
        """)
        return result

    # Experiments

    def audit_constants(self) -> AuditResult:
        """AT(n,p), L(n,p), ω_n and, for n >= 3, K_{a,b}"""
        def experiment() -> AuditResult:
            n = self.config.n
            rows = []
            for p in sorted(set(CONSTANT_TABLE_EXPONENTS) | {self.config.p}):
                row = {'n': n, 'p': p, 'omega_n': volume_unit_ball(n),
                       'AT': aubin_talenti(n, p) if p < n else None,
                       'L': log_sobolev_constant(n, p)}
                rows.append(row)
            details = {'rows_count': len(rows)}
            reports: Dict[str, Any] = {'constants': {'rows': rows}}
            if n >= 3:
                reports['ckn'] = ckn_constants(n, self.config.a, self.config.b).as_dict()
            return AuditResult(module_name='constants', status='OK',
                               message=f"Sharp constants for n={n}", details=details, reports=reports)
        return self._run('constants', experiment)

    def audit_manifold(self) -> AuditResult:
        def experiment() -> AuditResult:
            m = self.manifold
            report = validate_bishop_gromov(m, self._geometry_grid())
            status = 'OK' if report.passed else 'ERROR'
            message = (f"Bishop-Gromov holds on {m.label}" if report.passed else
                       f"Bishop-Gromov violated on {report.violation_interval}")
            details = {'avr': m.avr, 'violation_interval': report.violation_interval,
                       'worst_rho': report.worst_rho, 'description': m.describe()}
            return AuditResult(module_name='manifold', status=status, message=message,
                               details=details, reports={'bishop_gromov': report})
        return self._run('manifold', experiment)

    def audit_bubbles(self) -> AuditResult:
        """H, L₁/L₂ and K asymptotics against their closed-form limits"""
        def experiment() -> AuditResult:
            m, n, jobs = self.manifold, self.config.n, self.config.n_jobs
            params = log_sobolev_exponents(n, self.config.p)
            reports: Dict[str, Any] = {}
            if not params.is_endpoint:
                large = self._lambda_grid(1e2, 1e6)
                small = self._lambda_grid(1e-6, 1e-1)
                if params.p < n:
                    reports['H_n'] = verify_H_asymptotic(m, params, float(n), grid=large, n_jobs=jobs)
                l1, l2 = verify_L_asymptotics(m, params, grid=small, n_jobs=jobs)
                reports['L1'], reports['L2'] = l1, l2
                reports['L_ratio'] = verify_L_ratio(m, params, grid=small, n_jobs=jobs)
            if n >= 3:
                ckn = ckn_constants(n, self.config.a, self.config.b)
                t = ckn.profile_exponent
                reports['K_energy'] = verify_K_asymptotic(
                    m, 2.0 * ckn.a + 2.0 - 2.0 * ckn.b * ckn.q, t, 2.0 * (n - ckn.b * ckn.q) / t,
                    grid=self._lambda_grid(1e2, 1e6), n_jobs=jobs)
            status = worst_status(report_status(r) for r in reports.values())
            details = {name: r.relative_deviation for name, r in reports.items()}
            return AuditResult(module_name='bubbles', status=status,
                               message=f"{len(reports)} asymptotic checks on {m.label}",
                               details=details, reports=reports)
        return self._run('bubbles', experiment)

    def audit_scan(self, kind: str) -> AuditResult:
        """Sharpness scan sobolev, logsob or ckn"""
        def experiment() -> AuditResult:
            m, cfg = self.manifold, self.config
            if kind == 'sobolev':
                report = sobolev_sharpness_scan(m, sobolev_exponents(cfg.n, cfg.p),
                                                self._lambda_grid(1e2, 1e6), cfg.n_jobs, cfg.tol)
            elif kind == 'logsob':
                report = logsob_sharpness_scan(m, log_sobolev_exponents(cfg.n, cfg.p),
                                               self._lambda_grid(1e-6, 1e-1), cfg.n_jobs, cfg.tol)
            elif kind == 'ckn':
                report = ckn_sharpness_scan(m, cfg.a, cfg.b, self._lambda_grid(1e2, 1e6),
                                            cfg.n_jobs, cfg.tol)
            else:
                raise ValueError(f"Unknown scan {kind!r}")
            limit = report.limit.limit if report.limit is not None else None
            details = {'limit': limit, 'predicted': report.predicted,
                       'deviation': report.deviation, 'reliable': report.reliable,
                       'monotone': report.monotone}
            return AuditResult(module_name=f'scan-{kind}', status=report.status,
                               message=f"{kind} scan limit {limit} vs {report.predicted:.12g}",
                               details=details, reports={f'scan_{kind}': report})
        return self._run(f'scan-{kind}', experiment)

    def audit_transport(self) -> AuditResult:
        """Monge-Ampère residual, determinant-trace campaign and both proof pipelines"""
        def experiment() -> AuditResult:
            m, cfg = self.manifold, self.config
            n = cfg.n
            reports: Dict[str, Any] = {}
            statuses = []

            source = polynomial_bump_measure(m, 1.0, 3.0)
            target = polynomial_bump_measure(m, 1.5, 3.0, (0.2,))
            inst = solve_radial_transport(m, source, target, nodes=cfg.grid_nodes)
            residual = monge_ampere_residual(inst)
            trace = determinant_trace_check(inst)
            reports['determinant_trace'] = trace
            statuses.append(trace.status)
            statuses.append(self._residual_status(residual))

            refinement = refinement_study(m, source, target, REFINEMENT_NODES)
            reports['refinement'] = refinement
            statuses.append(refinement.status)

            campaign = random_instance_campaign(m, count=cfg.campaign_count, seed=cfg.seed,
                                                n_jobs=cfg.n_jobs)
            campaign_min = min(r.min_slack for r in campaign)
            statuses.extend(r.status for r in campaign)
            reports['campaign'] = {'rows': [{'instance': i, 'source': r.source, 'target': r.target,
                                             'min_slack': r.min_slack, 'status': r.status}
                                            for i, r in enumerate(campaign)]}

            if 1.0 < cfg.p < n:
                params = sobolev_exponents(n, cfg.p)
                f = normalize(smooth_bump(1.0, 3), m, params.p_star)
                pipeline = proof_pipeline_p_gt_1(m, params, f, 1.0, k=cfg.k, nodes=cfg.grid_nodes)
                reports['pipeline_p_gt_1'] = pipeline
                statuses.append(pipeline.status)
                statuses.append(self._residual_status(pipeline.monge_ampere_residual))

            f1 = normalize(mollified_ball_indicator(1.0, cfg.mollifier_width), m, n / (n - 1.0))
            pipeline_1 = proof_pipeline_p_eq_1(m, f1, 1.0, grid=self._lambda_grid(1e2, 1e6),
                                               nodes=cfg.grid_nodes)
            reports['pipeline_p_eq_1'] = pipeline_1
            statuses.append(pipeline_1.status)
            # the mollifier edge limits this residual to O((h/ε)^4) on the log grid
            residual_1 = pipeline_1.monge_ampere_residual
            if residual_1 is not None and residual_1 > MONGE_AMPERE_TOL:
                statuses.append('WARNING')

            details = {'monge_ampere_residual': residual, 'determinant_trace_min_slack': trace.min_slack,
                       'refinement_order': refinement.observed_order, 'campaign_min_slack': campaign_min,
                       'campaign_size': len(campaign),
                       'refinement_passed': refinement.passed,
                       'pipeline_p_eq_1_residual': pipeline_1.monge_ampere_residual}
            if 'pipeline_p_gt_1' in reports:
                details['pipeline_p_gt_1_residual'] = reports['pipeline_p_gt_1'].monge_ampere_residual
            status = worst_status(statuses)
            return AuditResult(module_name='transport', status=status,
                               message=f"Transport verification on {m.label}: {status}",
                               details=details, reports=reports)
        return self._run('transport', experiment)

    def audit_isoperimetric(self) -> AuditResult:
        def experiment() -> AuditResult:
            m = self.manifold
            report = isoperimetric_check(m, self._geometry_grid())
            return AuditResult(module_name='isoperimetric', status=report.status,
                               message=f"Minimum relative slack {report.min_relative_slack:.3e} at ρ={report.worst_rho:.6g}",
                               details={'min_slack': report.min_slack,
                                        'min_relative_slack': report.min_relative_slack,
                                        'worst_rho': report.worst_rho},
                               reports={'isoperimetric': report})
        return self._run('isoperimetric', experiment)

    def audit_noncollapse(self) -> AuditResult:
        """Volume non-collapse under the CKN constant C (default: the sharp constant of the manifold)"""
        def experiment() -> AuditResult:
            m, cfg = self.manifold, self.config
            c = cfg.c
            if c is None:
                ckn = ckn_constants(cfg.n, cfg.a, cfg.b)
                c = ckn.k_ab * m.avr ** (-ckn.weight_gap / cfg.n)
            report = noncollapse_check(m, cfg.a, cfg.b, c, self._geometry_grid())
            return AuditResult(module_name='noncollapse', status=report.status,
                               message=f"AVR {report.avr:.12g} against bound {report.bound:.12g}",
                               details={'c': c, 'bound': report.bound, 'avr': report.avr},
                               reports={'noncollapse': report})
        return self._run('noncollapse', experiment)
