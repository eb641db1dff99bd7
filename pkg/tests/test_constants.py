import math
import unittest

import mpmath
from hypothesis import given, settings, strategies as st

from src.core.constants import (aubin_talenti, ckn_constants, log_sobolev_constant,
                                log_sobolev_exponents, sobolev_exponents, volume_unit_ball)
from src.core.errors import ExponentRangeError, InvalidDimensionError, ParameterDomainError

mpmath.mp.dps = 40


def mp_aubin_talenti(n, p):
    n, p = mpmath.mpf(n), mpmath.mpf(p)
    pc = p / (p - 1)
    ratio = mpmath.gamma(1 + n / 2) * mpmath.gamma(n) / (mpmath.gamma(n / p) * mpmath.gamma(1 + n / pc))
    return (mpmath.pi ** -0.5 * n ** (-1 / p) * ((p - 1) / (n - p)) ** (1 / pc) * ratio ** (1 / n))


def mp_ckn_constant(n, a, b):
    n, a, b = mpmath.mpf(n), mpmath.mpf(a), mpmath.mpf(b)
    q = 2 * n / (n - 2 + 2 * (b - a))
    gap = a + 1 - b
    omega = mpmath.pi ** (n / 2) / mpmath.gamma(n / 2 + 1)
    inner = ((2 - b * q + 2 * a) / (n * omega)
             * mpmath.gamma(n / gap) / mpmath.gamma(n / (2 * gap)) ** 2)
    return ((n - 2 * a - 2) * (n - b * q)) ** -0.5 * inner ** (gap / n)


class TestVolumeUnitBall(unittest.TestCase):
    def test_low_dimensions(self):
        self.assertAlmostEqual(volume_unit_ball(2), math.pi, places=14)
        self.assertAlmostEqual(volume_unit_ball(3), 4.0 * math.pi / 3.0, places=14)
        self.assertAlmostEqual(volume_unit_ball(4), math.pi ** 2 / 2.0, places=14)

    def test_against_arbitrary_precision_gamma(self):
        for n in range(1, 12):
            expected = float(mpmath.pi ** (mpmath.mpf(n) / 2) / mpmath.gamma(mpmath.mpf(n) / 2 + 1))
            self.assertLess(abs(volume_unit_ball(n) / expected - 1.0), 1e-13)

    def test_invalid_dimension(self):
        with self.assertRaises(InvalidDimensionError):
            volume_unit_ball(0)
        with self.assertRaises(InvalidDimensionError):
            volume_unit_ball(2.5)


class TestExponents(unittest.TestCase):
    def test_sobolev_exponents(self):
        params = sobolev_exponents(4, 2)
        self.assertEqual(params.p_conj, 2.0)
        self.assertEqual(params.p_star, 4.0)

        params = sobolev_exponents(5, 2)
        self.assertAlmostEqual(params.p_star, 10.0 / 3.0, places=14)

    def test_endpoint_is_a_sentinel(self):
        params = sobolev_exponents(3, 1)
        self.assertTrue(params.is_endpoint)
        self.assertTrue(math.isinf(params.p_conj))
        self.assertAlmostEqual(params.p_star, 1.5, places=14)
        self.assertIsNone(params.as_dict()['p_conj'])

    def test_out_of_range(self):
        with self.assertRaises(ExponentRangeError):
            sobolev_exponents(3, 3)
        with self.assertRaises(ExponentRangeError):
            sobolev_exponents(3, 0.5)
        with self.assertRaises(InvalidDimensionError):
            sobolev_exponents(1, 1.5)

    def test_log_sobolev_accepts_large_p(self):
        params = log_sobolev_exponents(2, 3.0)
        self.assertIsNone(params.p_star)
        self.assertAlmostEqual(params.p_conj, 1.5, places=14)


class TestAubinTalenti(unittest.TestCase):
    def test_closed_form(self):
        for n, p in [(3, 2.0), (4, 1.5), (5, 3.0), (3, 1.5), (10, 2.0)]:
            expected = float(mp_aubin_talenti(n, p))
            self.assertLess(abs(aubin_talenti(n, p) / expected - 1.0), 1e-12, (n, p))

    def test_endpoint(self):
        self.assertAlmostEqual(aubin_talenti(2, 1), 1.0 / (2.0 * math.sqrt(math.pi)), places=14)
        expected = 1.0 / (3.0 * (4.0 * math.pi / 3.0) ** (1.0 / 3.0))
        self.assertAlmostEqual(aubin_talenti(3, 1), expected, places=14)

    def test_monotone_limit_as_p_decreases_to_one(self):
        endpoint = aubin_talenti(3, 1)
        gaps = [abs(aubin_talenti(3, 1.0 + 10.0 ** (-k)) - endpoint) for k in range(3, 7)]
        for wider, narrower in zip(gaps, gaps[1:]):
            self.assertLess(narrower, wider)
        self.assertLess(gaps[-1], 1e-4 * endpoint)

    @given(n=st.integers(min_value=2, max_value=12), fraction=st.floats(min_value=0.0, max_value=0.99))
    @settings(max_examples=50, deadline=None)
    def test_positive_over_domain(self, n, fraction):
        p = 1.0 + fraction * (n - 1.0)
        self.assertGreater(aubin_talenti(n, p), 0.0)


class TestLogSobolevConstant(unittest.TestCase):
    def test_p_two(self):
        for n in (2, 3, 4, 7):
            self.assertAlmostEqual(log_sobolev_constant(n, 2.0), 2.0 / (math.pi * n * math.e), places=14)

    def test_endpoint_equals_aubin_talenti(self):
        for n in (2, 3, 5):
            self.assertAlmostEqual(log_sobolev_constant(n, 1.0), aubin_talenti(n, 1.0), places=14)

    def test_limit_p_to_one(self):
        endpoint = log_sobolev_constant(3, 1.0)
        self.assertLess(abs(log_sobolev_constant(3, 1.0 + 1e-7) - endpoint), 1e-5 * endpoint)

    def test_rejects_p_below_one(self):
        with self.assertRaises(ExponentRangeError):
            log_sobolev_constant(3, 0.9)


class TestCknConstants(unittest.TestCase):
    def test_unweighted_case_is_aubin_talenti(self):
        for n in (3, 4, 5, 8):
            ckn = ckn_constants(n, 0.0, 0.0)
            self.assertAlmostEqual(ckn.q, 2.0 * n / (n - 2.0), places=14)
            self.assertLess(abs(ckn.k_ab / aubin_talenti(n, 2.0) - 1.0), 1e-12)

    def test_weighted_case(self):
        ckn = ckn_constants(4, 0.5, 0.5)
        self.assertAlmostEqual(ckn.q, 4.0, places=14)
        self.assertLess(abs(ckn.k_ab / float(mp_ckn_constant(4, 0.5, 0.5)) - 1.0), 1e-12)

        ckn = ckn_constants(4, 0.3, 0.5)
        self.assertLess(abs(ckn.k_ab / float(mp_ckn_constant(4, 0.3, 0.5)) - 1.0), 1e-12)
        self.assertAlmostEqual(ckn.weight_gap, 0.8, places=14)

    def test_inadmissible_weights(self):
        with self.assertRaises(ParameterDomainError):
            ckn_constants(4, 1.0, 1.0)
        with self.assertRaises(ParameterDomainError):
            ckn_constants(4, 0.5, 0.2)
        with self.assertRaises(ParameterDomainError):
            ckn_constants(4, 0.0, 1.0)
        with self.assertRaises(InvalidDimensionError):
            ckn_constants(2, 0.0, 0.0)


if __name__ == '__main__':
    unittest.main()
