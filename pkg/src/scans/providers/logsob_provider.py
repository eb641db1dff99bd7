import math
from typing import Dict

import numpy as np

from src.core.bubbles.asymptotics import default_small_grid
from src.core.bubbles.functionals import gaussian_L
from src.core.constants import log_sobolev_constant, log_sobolev_exponents
from src.core.errors import ExponentRangeError
from src.core.geometry.manifold import RadialManifold
from src.core.numerics.extrapolation import TOWARD_ZERO
from src.core.numerics.quadrature import DEFAULT_TOL
from .base import ScanPoint, SharpnessScan


class LogSobolevScan(SharpnessScan):
    """
    Gaussian-bubble scan of the L^p log-Sobolev constant

    C(λ) = exp(-(p/n)λL₂/L₁) L₁^{1-p/n} / ((λp'/p)^p L₂), with the limit
    L(n,p)·AVR^{-p/n} as λ→0.
    """

    def __init__(self, manifold: RadialManifold, p: float, name: str = 'logsob',
                 tol: float = DEFAULT_TOL):
        super().__init__(name, manifold, direction=TOWARD_ZERO)
        self._parameters = {'p': float(p), 'tol': float(tol)}
        if not self.validate_parameters(self._parameters):
            raise ExponentRangeError(f"Log-Sobolev scan needs p > 1, got p={p}", details={'p': p})
        self._on_parameters_changed()

    def _on_parameters_changed(self):
        self.params = log_sobolev_exponents(self.manifold.n, self._parameters['p'])

    def validate_parameters(self, parameters: Dict) -> bool:
        merged = {**self._parameters, **parameters}

        def check():
            if log_sobolev_exponents(self.manifold.n, merged['p']).is_endpoint:
                raise ExponentRangeError("Gaussian-bubble scan needs p > 1")
            if not float(merged['tol']) > 0.0:
                raise ValueError(f"Quadrature tolerance must be positive, got {merged['tol']}")

        return self._safe_validate(check)

    def evaluate(self, lam: float) -> ScanPoint:
        n, p, pc = self.manifold.n, self.params.p, self.params.p_conj
        l1, l2 = gaussian_L(self.manifold, self.params, lam, tol=self._parameters['tol'])
        ratio = lam * l2 / l1
        log_value = (-(p / n) * ratio + (1.0 - p / n) * math.log(l1)
                     - p * math.log(lam * pc / p) - math.log(l2))
        return ScanPoint(lam=lam, value=math.exp(log_value), terms={'L1': l1, 'L2': l2, 'ratio': ratio})

    def predicted_limit(self) -> float:
        n = self.manifold.n
        return log_sobolev_constant(n, self.params.p) * self.manifold.avr ** (-self.params.p / n)

    def default_grid(self) -> np.ndarray:
        return default_small_grid()
