from typing import Dict

import numpy as np

from src.core.bubbles.asymptotics import default_large_grid
from src.core.bubbles.functionals import BubbleQuery, talenti_H
from src.core.constants import aubin_talenti, sobolev_exponents
from src.core.errors import ExponentRangeError
from src.core.geometry.manifold import RadialManifold
from src.core.numerics.extrapolation import TOWARD_INFINITY
from src.core.numerics.quadrature import DEFAULT_TOL
from .base import ScanPoint, SharpnessScan


class SobolevScan(SharpnessScan):
    """
    Talentian-bubble scan of the L^p Sobolev constant

    C(λ) = H(λ,n)^{1/p★} / (((n-p)/p) p' (H(λ,n-1) - λH(λ,n))^{1/p}) is the
    Sobolev ratio of the bubble (λ + d^{p'})^{(p-n)/p}; as λ→∞ it tends to
    AT(n,p)·AVR^{-1/n}.
    """

    def __init__(self, manifold: RadialManifold, p: float, name: str = 'sobolev',
                 tol: float = DEFAULT_TOL):
        super().__init__(name, manifold, direction=TOWARD_INFINITY)
        self._parameters = {'p': float(p), 'tol': float(tol)}
        if not self.validate_parameters(self._parameters):
            raise ExponentRangeError(f"Sobolev scan needs 1 < p < n, got p={p}, n={manifold.n}",
                                     details={'n': manifold.n, 'p': p})
        self._on_parameters_changed()

    def _on_parameters_changed(self):
        self.params = sobolev_exponents(self.manifold.n, self._parameters['p'])

    def validate_parameters(self, parameters: Dict) -> bool:
        merged = {**self._parameters, **parameters}

        def check():
            params = sobolev_exponents(self.manifold.n, merged['p'])
            if params.is_endpoint:
                raise ExponentRangeError("Talentian scan needs p > 1; use the isoperimetric check at p = 1")
            if not float(merged['tol']) > 0.0:
                raise ValueError(f"Quadrature tolerance must be positive, got {merged['tol']}")

        return self._safe_validate(check)

    def evaluate(self, lam: float) -> ScanPoint:
        n, params = self.manifold.n, self.params
        p, pc, p_star = params.p, params.p_conj, params.p_star
        tol = self._parameters['tol']

        h_n = talenti_H(BubbleQuery(self.manifold, params, lam, s=n), tol=tol)
        h_n1 = talenti_H(BubbleQuery(self.manifold, params, lam, s=n - 1), tol=tol)
        moment = h_n1 - lam * h_n
        value = h_n ** (1.0 / p_star) / (((n - p) / p) * pc * moment ** (1.0 / p))
        return ScanPoint(lam=lam, value=value, terms={'H_n': h_n, 'H_n_minus_1': h_n1, 'moment': moment})

    def predicted_limit(self) -> float:
        return aubin_talenti(self.manifold.n, self.params.p) * self.manifold.avr ** (-1.0 / self.manifold.n)

    def default_grid(self) -> np.ndarray:
        return default_large_grid()
