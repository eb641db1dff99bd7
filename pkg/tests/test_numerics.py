import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from src.core.errors import (ConvergenceError, InsufficientDataError, IntegrandDomainError,
                             ParameterDomainError, StepSizeError)
from src.core.geometry.manifold import euclidean, radial_integral
from src.core.numerics.extrapolation import (TOWARD_INFINITY, TOWARD_ZERO, extrapolate_limit,
                                             geometric_grid, numeric_derivative, ratio_grid,
                                             sample_on_grid)
from src.core.numerics.quadrature import TailClass, gauss_legendre_cells, integrate_improper


class TestIntegrateImproper(unittest.TestCase):
    def test_algebraic_tail(self):
        result = integrate_improper(lambda rho: (1.0 + rho * rho) ** -2, tail=TailClass.algebraic(4.0))
        self.assertLess(abs(result.value / (math.pi / 4.0) - 1.0), 1e-10)
        self.assertGreater(result.evaluations, 0)

    def test_singular_head(self):
        result = integrate_improper(lambda rho: rho ** -0.5 * math.exp(-rho),
                                    tail=TailClass.exponential(), singularity=0.5)
        self.assertLess(abs(result.value / math.sqrt(math.pi) - 1.0), 1e-10)

    def test_compact_support_with_kink(self):
        result = integrate_improper(lambda rho: max(0.0, 1.0 - abs(rho - 1.0)),
                                    tail=TailClass.compact(2.0), points=[1.0])
        self.assertAlmostEqual(result.value, 1.0, places=12)

    def test_scale_invariance(self):
        # ∫ c^{-1} e^{-ρ/c} dρ = 1 for every scale c
        for c in (1e-4, 1.0, 1e4):
            result = integrate_improper(lambda rho: math.exp(-rho / c) / c, scale=c)
            self.assertAlmostEqual(result.value, 1.0, places=10)

    def test_non_finite_integrand(self):
        with self.assertRaises(IntegrandDomainError):
            integrate_improper(lambda rho: math.nan)

    def test_invalid_arguments(self):
        with self.assertRaises(ParameterDomainError):
            integrate_improper(lambda rho: 1.0, scale=0.0)
        with self.assertRaises(ParameterDomainError):
            integrate_improper(lambda rho: 1.0, singularity=1.0)
        with self.assertRaises(ParameterDomainError):
            TailClass.algebraic(1.0)

    def test_tail_slower_than_declared(self):
        m = euclidean(3)
        cases = [(-3.2, TailClass.exponential()), (-3.0, TailClass.algebraic(2.0)),
                 (-3.2, TailClass.algebraic(5.0))]
        for power, tail in cases:
            with self.assertRaises(ConvergenceError, msg=(power, tail.describe())):
                radial_integral(m, lambda rho, q=power: (1.0 + rho) ** q, tail=tail)

    def test_declared_tail_matches(self):
        # 4π B(3, 3) = 4π/30
        result = radial_integral(euclidean(3), lambda rho: (1.0 + rho) ** -6.0, tail=TailClass.algebraic(4.0))
        self.assertLess(abs(result.value / (4.0 * math.pi / 30.0) - 1.0), 1e-10)
        # a faster tail than declared is accepted
        result = radial_integral(euclidean(3), lambda rho: math.exp(-rho), tail=TailClass.algebraic(3.0))
        self.assertLess(abs(result.value / (8.0 * math.pi) - 1.0), 1e-9)

    def test_gauss_legendre_cells_are_exact_on_polynomials(self):
        edges = np.array([0.0, 0.5, 1.0, 3.0])
        cells = gauss_legendre_cells(lambda x: x ** 5, edges)
        expected = np.diff(edges ** 6) / 6.0
        np.testing.assert_allclose(cells, expected, rtol=1e-13)


class TestExtrapolation(unittest.TestCase):
    def test_power_law_toward_infinity(self):
        grid = geometric_grid(1e2, 1e6, 12)
        samples = [(lam, 2.0 + 3.0 * lam ** -1.5) for lam in grid]
        estimate = extrapolate_limit(samples, TOWARD_INFINITY)
        self.assertTrue(estimate.reliable)
        self.assertLess(abs(estimate.limit - 2.0), 1e-10)
        self.assertAlmostEqual(estimate.correction_exponent, 1.5, places=5)

    def test_power_law_toward_zero(self):
        grid = geometric_grid(1e-6, 1e-1, 12)
        samples = [(lam, 1.0 - 0.5 * lam ** 0.7) for lam in grid]
        estimate = extrapolate_limit(samples, TOWARD_ZERO)
        self.assertLess(abs(estimate.limit - 1.0), 1e-10)
        self.assertEqual(estimate.direction, TOWARD_ZERO)

    def test_constant_samples(self):
        samples = [(lam, 0.25) for lam in geometric_grid(1.0, 1e3, 6)]
        estimate = extrapolate_limit(samples)
        self.assertEqual(estimate.method, 'constant')
        self.assertEqual(estimate.limit, 0.25)
        self.assertTrue(math.isinf(estimate.correction_exponent))
        self.assertIsNone(estimate.as_dict()['correction_exponent'])

    def test_known_exponent_uses_richardson(self):
        samples = [(lam, 5.0 + lam ** -2.0) for lam in ratio_grid(10.0, 6)]
        estimate = extrapolate_limit(samples, alpha=2.0)
        self.assertEqual(estimate.method, 'richardson')
        self.assertAlmostEqual(estimate.limit, 5.0, places=10)

    def test_oscillating_tail_is_unreliable(self):
        samples = [(lam, 1.0 + 0.1 * (-1) ** i) for i, lam in enumerate(geometric_grid(1.0, 1e3, 8))]
        estimate = extrapolate_limit(samples)
        self.assertFalse(estimate.reliable)
        self.assertTrue(estimate.message)

    def test_too_few_samples(self):
        with self.assertRaises(InsufficientDataError):
            extrapolate_limit([(1.0, 1.0), (2.0, 1.5), (4.0, 1.75)])

    def test_invalid_direction(self):
        with self.assertRaises(ParameterDomainError):
            extrapolate_limit([(1.0, 1.0)] * 4, direction='sideways')

    @given(limit=st.floats(min_value=0.1, max_value=10.0),
           coeff=st.floats(min_value=0.05, max_value=5.0),
           alpha=st.floats(min_value=0.3, max_value=3.0))
    @settings(max_examples=30, deadline=None)
    def test_recovers_pure_power_laws(self, limit, coeff, alpha):
        samples = [(lam, limit + coeff * lam ** -alpha) for lam in geometric_grid(1e2, 1e6, 12)]
        estimate = extrapolate_limit(samples)
        self.assertLess(abs(estimate.limit - limit) / limit, 1e-6)


class TestGridsAndDerivatives(unittest.TestCase):
    def test_grids(self):
        grid = geometric_grid(1e-2, 1e2, 5)
        np.testing.assert_allclose(grid, [1e-2, 1e-1, 1.0, 1e1, 1e2], rtol=1e-14)
        np.testing.assert_allclose(ratio_grid(1.0, 4), [1.0, 2.0, 4.0, 8.0])
        with self.assertRaises(ParameterDomainError):
            geometric_grid(1.0, 0.5, 4)
        with self.assertRaises(ParameterDomainError):
            ratio_grid(1.0, 4, ratio=1.0)

    def test_sample_on_grid_keeps_order(self):
        grid = geometric_grid(1.0, 1e3, 7)
        serial = sample_on_grid(lambda lam: lam * lam, grid)
        threaded = sample_on_grid(lambda lam: lam * lam, grid, n_jobs=2)
        self.assertEqual(serial, threaded)

    def test_numeric_derivative(self):
        self.assertAlmostEqual(numeric_derivative(math.sin, 1.0, 1e-2), math.cos(1.0), places=9)

    def test_stencil_leaving_domain(self):
        with self.assertRaises(StepSizeError):
            numeric_derivative(math.log, 0.1, 0.05)
        with self.assertRaises(StepSizeError):
            numeric_derivative(math.log, 1.0, 0.0)


if __name__ == '__main__':
    unittest.main()
