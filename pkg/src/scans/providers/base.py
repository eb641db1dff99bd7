import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from src.core.errors import LabError
from src.core.geometry.manifold import RadialManifold
from src.core.numerics.extrapolation import TOWARD_INFINITY, LimitEstimate
from src.utils.logger import setup_logger

SCAN_TOL = 1e-4


@dataclass
class ScanPoint:
    """Extracted constant C(λ) at one grid point with the functionals it came from"""
    lam: float
    value: float
    terms: Dict[str, float] = field(default_factory=dict)

    def is_valid(self) -> bool:
        return math.isfinite(self.value) and self.value > 0.0


@dataclass
class ScanReport:
    """λ-series of a sharpness scan with its extrapolated limit and verdict"""
    scan: str
    manifold: str
    parameters: Dict
    points: List[ScanPoint]
    limit: Optional[LimitEstimate]
    predicted: float
    tolerance: float
    diagnostic: bool = False
    monotone: Optional[bool] = None

    @property
    def deviation(self) -> float:
        """Relative distance of the extrapolated limit from the predicted sharp constant"""
        if self.limit is None or not math.isfinite(self.limit.limit):
            return math.inf
        return abs(self.limit.limit - self.predicted) / abs(self.predicted)

    @property
    def reliable(self) -> bool:
        return self.limit is not None and self.limit.reliable

    @property
    def passed(self) -> bool:
        return self.reliable and self.deviation <= self.tolerance

    @property
    def status(self) -> str:
        if self.passed:
            return 'OK'
        if self.diagnostic or (not self.reliable and self.deviation <= self.tolerance):
            return 'WARNING'
        return 'ERROR'

    @property
    def rows(self) -> List[Dict]:
        """CSV series: λ, C(λ) and its signed distance from the predicted limit"""
        return [{'lambda': point.lam, 'value': point.value, 'error': point.value - self.predicted}
                for point in self.points]

    def values(self) -> np.ndarray:
        return np.array([point.value for point in self.points])

    def as_dict(self) -> dict:
        return {
            'scan': self.scan,
            'manifold': self.manifold,
            'parameters': self.parameters,
            'rows': self.rows,
            'terms': [dict(point.terms, **{'lambda': point.lam}) for point in self.points],
            'limit': self.limit.as_dict() if self.limit is not None else None,
            'predicted': self.predicted,
            'deviation': self.deviation,
            'tolerance': self.tolerance,
            'monotone': self.monotone,
            'diagnostic': self.diagnostic,
            'passed': self.passed,
            'status': self.status,
        }


class SharpnessScan(ABC):
    """Base class for λ-scans that extract a sharp constant from a bubble family"""

    def __init__(self, name: str, manifold: RadialManifold, direction: str = TOWARD_INFINITY):
        """
        Initialize sharpness scan

        Args:
            name: Scan name, unique within a ScanManager
            manifold: Model the bubbles live on
            direction: Limit the grid is pushed toward (TOWARD_INFINITY or TOWARD_ZERO)
        """
        self.name = name
        self.manifold = manifold
        self.direction = direction
        self._parameters: Dict = {}
        self._setup_logging()

    def _setup_logging(self):
        self.logger = setup_logger('SharpnessScan')

    @abstractmethod
    def evaluate(self, lam: float) -> ScanPoint:
        """C(λ) from the bubble functionals at λ"""

    @abstractmethod
    def predicted_limit(self) -> float:
        """Sharp constant the scan should converge to on this manifold"""

    @abstractmethod
    def default_grid(self) -> np.ndarray:
        """λ-grid used when the caller supplies none"""

    @abstractmethod
    def validate_parameters(self, parameters: Dict) -> bool:
        """
        Validate scan parameters

        Args:
            parameters: Dictionary of parameters to validate

        Returns:
            True if parameters are valid
        """

    def _on_parameters_changed(self):
        """Hook for scans that cache exponent bookkeeping"""

    def get_parameters(self) -> Dict:
        return self._parameters.copy()

    def _safe_validate(self, check) -> bool:
        try:
            check()
            return True
        except LabError as e:
            self.logger.warning(f"Invalid parameters for scan {self.name}: {str(e)}")
            return False
        except (TypeError, ValueError, KeyError) as e:
            self.logger.warning(f"Malformed parameters for scan {self.name}: {str(e)}")
            return False
