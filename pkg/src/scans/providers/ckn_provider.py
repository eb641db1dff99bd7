from typing import Dict

import numpy as np

from src.core.bubbles.asymptotics import default_large_grid
from src.core.bubbles.functionals import ckn_K
from src.core.constants import ckn_constants
from src.core.errors import ParameterDomainError
from src.core.geometry.manifold import RadialManifold
from src.core.numerics.extrapolation import TOWARD_INFINITY
from src.core.numerics.quadrature import DEFAULT_TOL
from .base import ScanPoint, SharpnessScan


class CknScan(SharpnessScan):
    """
    Weighted-bubble scan of the Caffarelli-Kohn-Nirenberg constant

    With t = 2 - bq + 2a,
    C(λ) = K(λ, -bq, t, q(n-2a-2)/t)^{1/q} / ((n-2a-2) K(λ, 2a+2-2bq, t, 2(n-bq)/t)^{1/2}),
    whose λ→∞ limit is K_{a,b}·AVR^{-(a+1-b)/n}.
    """

    def __init__(self, manifold: RadialManifold, a: float, b: float, name: str = 'ckn',
                 tol: float = DEFAULT_TOL):
        super().__init__(name, manifold, direction=TOWARD_INFINITY)
        self._parameters = {'a': float(a), 'b': float(b), 'tol': float(tol)}
        if not self.validate_parameters(self._parameters):
            raise ParameterDomainError(f"Inadmissible CKN weights a={a}, b={b} for n={manifold.n}",
                                       details={'n': manifold.n, 'a': a, 'b': b})
        self._on_parameters_changed()

    def _on_parameters_changed(self):
        self.ckn = ckn_constants(self.manifold.n, self._parameters['a'], self._parameters['b'])

    def validate_parameters(self, parameters: Dict) -> bool:
        merged = {**self._parameters, **parameters}

        def check():
            ckn_constants(self.manifold.n, merged['a'], merged['b'])
            if not float(merged['tol']) > 0.0:
                raise ValueError(f"Quadrature tolerance must be positive, got {merged['tol']}")

        return self._safe_validate(check)

    def evaluate(self, lam: float) -> ScanPoint:
        n = self.manifold.n
        a, b, q = self.ckn.a, self.ckn.b, self.ckn.q
        t = self.ckn.profile_exponent
        tol = self._parameters['tol']

        mass = ckn_K(self.manifold, lam, -b * q, t, q * (n - 2.0 * a - 2.0) / t, tol=tol)
        energy = ckn_K(self.manifold, lam, 2.0 * a + 2.0 - 2.0 * b * q, t, 2.0 * (n - b * q) / t, tol=tol)
        value = mass ** (1.0 / q) / ((n - 2.0 * a - 2.0) * energy ** 0.5)
        return ScanPoint(lam=lam, value=value, terms={'K_mass': mass, 'K_energy': energy})

    def predicted_limit(self) -> float:
        return self.ckn.k_ab * self.manifold.avr ** (-self.ckn.weight_gap / self.manifold.n)

    def default_grid(self) -> np.ndarray:
        return default_large_grid()
