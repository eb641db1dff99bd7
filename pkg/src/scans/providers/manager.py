from typing import Dict, Optional, Sequence

import numpy as np

from src.core.constants import SobolevParams
from src.core.errors import ParameterDomainError
from src.core.geometry.manifold import RadialManifold
from src.core.numerics.extrapolation import sample_on_grid
from src.utils.logger import setup_logger
from .base import SCAN_TOL, ScanReport, SharpnessScan
from .evaluator import ScanEvaluator


class ScanManager:
    """Registers sharpness scans on one manifold and runs them over λ-grids"""

    def __init__(self, manifold: RadialManifold, n_jobs: int = 1, tolerance: float = SCAN_TOL):
        """
        Initialize Scan Manager

        Args:
            manifold: Model every registered scan runs on
            n_jobs: joblib workers for the λ-grid
            tolerance: Relative tolerance handed to the evaluator
        """
        self.manifold = manifold
        self.n_jobs = n_jobs
        self.providers: Dict[str, SharpnessScan] = {}
        self._setup_logging()
        self.evaluator = ScanEvaluator(tolerance)

    def _setup_logging(self):
        self.logger = setup_logger('ScanManager')

    def add_provider(self, provider: SharpnessScan) -> bool:
        """
        Add new scan

        Returns:
            True if the scan was added
        """
        if provider.name in self.providers:
            self.logger.warning(f"Scan {provider.name} already exists")
            return False
        if provider.manifold is not self.manifold:
            self.logger.warning(f"Scan {provider.name} lives on {provider.manifold.label}, "
                                f"not on {self.manifold.label}")
            return False
        self.providers[provider.name] = provider
        self.logger.info(f"Added scan: {provider.name}")
        return True

    def run_scan(self, name: str, grid: Optional[Sequence[float]] = None) -> ScanReport:
        """
        Evaluate one scan on a λ-grid and extrapolate

        Raises:
            ParameterDomainError: unknown scan or invalid grid
        """
        if name not in self.providers:
            raise ParameterDomainError(f"No scan named {name!r}; registered: {sorted(self.providers)}")
        scan = self.providers[name]
        lams = scan.default_grid() if grid is None else np.asarray(grid, dtype=float)
        if lams.size == 0 or np.any(lams <= 0.0) or np.any(~np.isfinite(lams)):
            raise ParameterDomainError("λ-grid must be non-empty, positive and finite")

        self.logger.info(f"""
        ================ SHARPNESS SCAN START ================
        Scan: {scan.name}
        Manifold: {self.manifold.label}
        Parameters: {scan.get_parameters()}
        λ-grid: {lams.size} points in [{lams.min():.3g}, {lams.max():.3g}]
        Workers: {self.n_jobs}
        """)
        points = sample_on_grid(scan.evaluate, lams, n_jobs=self.n_jobs)
        report = self.evaluator.evaluate_scan(scan, points)
        self.logger.info(f"""
        ================ SHARPNESS SCAN END ================
        Scan: {scan.name}
        Status: {report.status}
        """)
        return report


def _single_scan(manifold: RadialManifold, scan: SharpnessScan, grid, n_jobs: int,
                 tolerance: float) -> ScanReport:
    manager = ScanManager(manifold, n_jobs=n_jobs, tolerance=tolerance)
    manager.add_provider(scan)
    return manager.run_scan(scan.name, grid)


def sobolev_sharpness_scan(manifold: RadialManifold, params: SobolevParams,
                           grid: Optional[Sequence[float]] = None, n_jobs: int = 1,
                           tolerance: float = SCAN_TOL) -> ScanReport:
    """C(λ) from Talentian bubbles, extrapolated λ→∞ against AT(n,p)·AVR^{-1/n}"""
    from .sobolev_provider import SobolevScan
    return _single_scan(manifold, SobolevScan(manifold, params.p), grid, n_jobs, tolerance)


def logsob_sharpness_scan(manifold: RadialManifold, params: SobolevParams,
                          grid: Optional[Sequence[float]] = None, n_jobs: int = 1,
                          tolerance: float = SCAN_TOL) -> ScanReport:
    """C(λ) from Gaussian bubbles, extrapolated λ→0 against L(n,p)·AVR^{-p/n}"""
    from .logsob_provider import LogSobolevScan
    return _single_scan(manifold, LogSobolevScan(manifold, params.p), grid, n_jobs, tolerance)


def ckn_sharpness_scan(manifold: RadialManifold, a: float, b: float,
                       grid: Optional[Sequence[float]] = None, n_jobs: int = 1,
                       tolerance: float = SCAN_TOL) -> ScanReport:
    """C(λ) from weighted bubbles, extrapolated λ→∞ against K_{a,b}·AVR^{-(a+1-b)/n}"""
    from .ckn_provider import CknScan
    return _single_scan(manifold, CknScan(manifold, a, b), grid, n_jobs, tolerance)
