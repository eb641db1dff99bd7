import os
import unittest

import mpmath

from src.core.bubbles.asymptotics import (truncation_sequence, verify_H_asymptotic,
                                          verify_K_asymptotic, verify_L_asymptotics, verify_L_ratio)
from src.core.bubbles.functionals import (BubbleQuery, K_limit_constant, ckn_K, euclidean_H,
                                          euclidean_K, euclidean_L, g_moment_identity, gaussian_L,
                                          talenti_H, truncation)
from src.core.constants import log_sobolev_exponents, sobolev_exponents, volume_unit_ball
from src.core.errors import DivergentIntegralError, ExponentRangeError, ParameterDomainError
from src.core.geometry.manifold import cone, euclidean, from_table
from src.core.geometry.profile_table import load_profile_table
from src.core.numerics.extrapolation import geometric_grid, numeric_derivative

mpmath.mp.dps = 30

SAMPLE_PROFILE = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                              'config', 'profiles', 'sample_n3_theta0.5.csv')
CLOSED_FORM_TOL = 1e-9


def mp_K(n, lam, r, t, s):
    """Beta-function reduction of ∫_{R^n} |x|^r (λ + |x|^t)^{-s} dx"""
    n, lam, r, t, s = (mpmath.mpf(v) for v in (n, lam, r, t, s))
    m = (n + r) / t
    omega = mpmath.pi ** (n / 2) / mpmath.gamma(n / 2 + 1)
    return (n / t) * omega * lam ** (m - s) * mpmath.beta(m, s - m)


class TestEuclideanClosedForms(unittest.TestCase):
    def test_talenti_H(self):
        for n in (2, 3, 4, 5):
            for p in (1.5, 2.0, 3.0):
                if p >= n:
                    continue
                params = sobolev_exponents(n, p)
                for lam in (0.5, 1.0, 20.0):
                    for s in (float(n), n - 0.5):
                        if not s > n / params.p_conj:
                            continue
                        value = talenti_H(BubbleQuery(euclidean(n), params, lam, s=s))
                        expected = float(mp_K(n, lam, 0.0, params.p_conj, s))
                        self.assertLess(abs(value / expected - 1.0), CLOSED_FORM_TOL, (n, p, lam, s))
                        self.assertLess(abs(euclidean_H(n, params.p_conj, lam, s) / expected - 1.0), 1e-12)

    def test_gaussian_L(self):
        for n in (2, 3, 4, 5):
            for p in (1.5, 2.0, 3.0):
                params = log_sobolev_exponents(n, p)
                pc = params.p_conj
                for lam in (0.1, 1.0, 10.0):
                    l1, l2 = gaussian_L(euclidean(n), params, lam)
                    omega = volume_unit_ball(n)
                    expected_l1 = float(omega * mpmath.gamma(mpmath.mpf(n) / pc + 1) * mpmath.mpf(lam) ** (-n / pc))
                    expected_l2 = float((n / pc) * expected_l1 / lam)
                    self.assertLess(abs(l1 / expected_l1 - 1.0), CLOSED_FORM_TOL, (n, p, lam))
                    self.assertLess(abs(l2 / expected_l2 - 1.0), CLOSED_FORM_TOL, (n, p, lam))
                    closed_l1, closed_l2 = euclidean_L(n, pc, lam)
                    self.assertLess(abs(closed_l1 / expected_l1 - 1.0), 1e-12)
                    self.assertLess(abs(closed_l2 / expected_l2 - 1.0), 1e-12)

    def test_ckn_K(self):
        cases = [(3, 0.0, 2.0, 3.0), (3, -1.0, 1.5, 4.0), (4, 1.0, 2.0, 4.0), (5, -0.5, 1.2, 6.0),
                 (2, 0.5, 2.0, 2.0)]
        for n, r, t, s in cases:
            for lam in (0.3, 1.0, 50.0):
                value = ckn_K(euclidean(n), lam, r, t, s)
                expected = float(mp_K(n, lam, r, t, s))
                self.assertLess(abs(value / expected - 1.0), CLOSED_FORM_TOL, (n, r, t, s, lam))
                self.assertLess(abs(euclidean_K(n, lam, r, t, s) / expected - 1.0), 1e-12)

    def test_domain_errors(self):
        params = sobolev_exponents(3, 2.0)
        with self.assertRaises(DivergentIntegralError):
            talenti_H(BubbleQuery(euclidean(3), params, 1.0, s=1.5))
        with self.assertRaises(ParameterDomainError):
            talenti_H(BubbleQuery(euclidean(3), params, 0.0, s=3.0))
        with self.assertRaises(ExponentRangeError):
            talenti_H(BubbleQuery(euclidean(3), sobolev_exponents(3, 1.0), 1.0, s=3.0))
        with self.assertRaises(DivergentIntegralError):
            ckn_K(euclidean(3), 1.0, 0.0, 2.0, 1.5)
        with self.assertRaises(ParameterDomainError):
            gaussian_L(euclidean(3), params, 1.0, k=-1.0)


class TestConeAsymptotics(unittest.TestCase):
    def test_H_limit_on_cone(self):
        m = cone(3, 0.5)
        params = sobolev_exponents(3, 2.0)
        for s in (2.5, 3.0):
            report = verify_H_asymptotic(m, params, s, grid=geometric_grid(1e2, 1e6, 8))
            expected = float(4 * mpmath.pi / 3 * mpmath.mpf('0.5') * mpmath.gamma(2.5)
                             * mpmath.gamma(s - 1.5) / mpmath.gamma(s))
            self.assertLess(abs(report.predicted / expected - 1.0), 1e-12)
            self.assertLess(report.relative_deviation, 1e-6)

    def test_L_limits_on_cones(self):
        for n, theta in ((2, 1.0), (3, 0.5), (4, 0.25)):
            m = cone(n, theta)
            params = log_sobolev_exponents(n, 2.0)
            grid = geometric_grid(1e-6, 1e-1, 8)
            l1, l2 = verify_L_asymptotics(m, params, grid=grid)
            self.assertLess(l1.relative_deviation, 1e-6, (n, theta))
            self.assertLess(l2.relative_deviation, 1e-6, (n, theta))
            ratio = verify_L_ratio(m, params, grid=grid)
            self.assertLess(abs(ratio.measured.limit - n / 2.0), 1e-8 * n)

    def test_K_limit_on_cone(self):
        m = cone(4, 0.25)
        # a = b = 0: energy functional K(λ, 2, 2, n)
        report = verify_K_asymptotic(m, 2.0, 2.0, 4.0, grid=geometric_grid(1e2, 1e6, 8))
        self.assertLess(abs(report.predicted / (0.25 * K_limit_constant(4, 1.0, 2.0, 2.0, 4.0)) - 1.0), 1e-13)
        self.assertLess(report.relative_deviation, 1e-6)

    def test_H_limit_on_table_profile(self):
        m = from_table(3, load_profile_table(SAMPLE_PROFILE))
        report = verify_H_asymptotic(m, sobolev_exponents(3, 2.0), 3.0, grid=geometric_grid(1e2, 1e6, 12))
        self.assertTrue(report.diagnostic)
        self.assertLess(report.relative_deviation, 1e-2)


class TestFunctionalIdentities(unittest.TestCase):
    def manifolds(self):
        return [euclidean(3), cone(3, 0.5), from_table(3, load_profile_table(SAMPLE_PROFILE))]

    def test_L2_is_minus_derivative_of_L1(self):
        params = log_sobolev_exponents(3, 2.0)
        for m in self.manifolds():
            for lam in (0.1, 1.0, 10.0):
                derivative = numeric_derivative(lambda x: gaussian_L(m, params, x)[0], lam, 1e-2 * lam)
                _, l2 = gaussian_L(m, params, lam)
                self.assertLess(abs(-derivative / l2 - 1.0), 1e-6, (m.label, lam))

    def test_moment_identity(self):
        params = sobolev_exponents(3, 2.0)
        for m in self.manifolds():
            for lam in (0.5, 5.0):
                direct, reduced = g_moment_identity(m, params, lam)
                self.assertLess(abs(direct / reduced - 1.0), 1e-8, (m.label, lam))

    def test_truncation_profile(self):
        self.assertEqual(truncation(2.0, 1.0), 1.0)
        self.assertAlmostEqual(truncation(2.0, 2.25), 0.75)
        self.assertEqual(truncation(2.0, 3.5), 0.0)

    def test_truncated_H_increases_to_full_value(self):
        params = sobolev_exponents(3, 2.0)
        truncated, full = truncation_sequence(cone(3, 0.5), params, 1.0, 3.0, (2.0, 5.0, 10.0, 20.0))
        for smaller, larger in zip(truncated, truncated[1:]):
            self.assertLess(smaller, larger)
        self.assertLess(truncated[-1], full)
        self.assertLess(abs(truncated[-1] / full - 1.0), 1e-3)

    def test_truncated_L1_below_full_value(self):
        params = log_sobolev_exponents(3, 2.0)
        full, _ = gaussian_L(euclidean(3), params, 0.1)
        cut, _ = gaussian_L(euclidean(3), params, 0.1, k=6.0)
        self.assertLess(cut, full)
        self.assertGreater(cut, 0.5 * full)


if __name__ == '__main__':
    unittest.main()
