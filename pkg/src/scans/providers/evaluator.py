import traceback
from typing import List, Optional

import numpy as np

from src.core.errors import InsufficientDataError
from src.core.numerics.extrapolation import TOWARD_INFINITY, extrapolate_limit
from src.utils.logger import setup_logger
from .base import SCAN_TOL, ScanPoint, ScanReport, SharpnessScan

# Relative slack allowed when checking that C(λ) approaches its limit monotonically
MONOTONE_SLACK = 1e-10


class ScanEvaluator:
    """Turns a λ-series of extracted constants into a ScanReport"""

    def __init__(self, tolerance: float = SCAN_TOL):
        """
        Initialize ScanEvaluator

        Args:
            tolerance: Relative deviation of the limit from the sharp constant
                above which a scan fails
        """
        self.tolerance = tolerance
        self._setup_logging()
        self.logger.info(f"ScanEvaluator initialized with tolerance {tolerance:g}")

    def _setup_logging(self):
        self.logger = setup_logger('ScanEvaluator')

    def evaluate_scan(self, scan: SharpnessScan, points: List[ScanPoint]) -> ScanReport:
        """
        Extrapolate the series toward the scan's limit and compare with the sharp constant

        An unreliable extrapolation is reported through the status, never raised.
        """
        predicted = scan.predicted_limit()
        report = ScanReport(scan=scan.name, manifold=scan.manifold.label,
                            parameters=scan.get_parameters(), points=list(points), limit=None,
                            predicted=predicted, tolerance=self.tolerance,
                            diagnostic=scan.manifold.is_diagnostic)

        invalid = [point.lam for point in points if not point.is_valid()]
        if invalid:
            self.logger.error(f"Scan {scan.name} produced non-positive or non-finite values at λ={invalid}")
            return report

        try:
            report.limit = extrapolate_limit([(point.lam, point.value) for point in points],
                                             direction=scan.direction)
            report.monotone = self._approaches_monotonically(points, report.limit.limit, scan.direction)
        except InsufficientDataError as e:
            self.logger.error(f"""
            Scan Extrapolation Error:
            Scan: {scan.name}
            Error: {str(e)}
            Traceback: {traceback.format_exc()}
            """)
            return report

        self.logger.info(f"""
        Scan Evaluation:
        - Scan: {scan.name} on {scan.manifold.label}
        - Limit: {report.limit.limit:.15g} ({report.limit.method}, reliable: {report.limit.reliable})
        - Predicted: {predicted:.15g}
        - Relative deviation: {report.deviation:.3e}
        - Monotone approach: {report.monotone}
        - Status: {report.status}
        """)
        return report

    @staticmethod
    def _approaches_monotonically(points: List[ScanPoint], limit: float,
                                  direction: str) -> Optional[bool]:
        """Distance to the limit is non-increasing along the grid toward the limit"""
        ordered = sorted(points, key=lambda point: point.lam, reverse=direction != TOWARD_INFINITY)
        distance = np.abs(np.array([point.value for point in ordered]) - limit)
        if distance.size < 2:
            return None
        return bool(np.all(np.diff(distance) <= MONOTONE_SLACK * abs(limit)))
