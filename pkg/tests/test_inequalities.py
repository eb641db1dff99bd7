import math
import os
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from src.core.constants import aubin_talenti, ckn_constants, log_sobolev_exponents, sobolev_exponents
from src.core.errors import HypothesisViolationError, ParameterDomainError, PreconditionError
from src.core.geometry.manifold import cone, euclidean, from_table
from src.core.geometry.profile_table import load_profile_table
from src.core.inequalities.functions import (ckn_bubble, dilate, gaussian_bubble, gaussian_profile,
                                             normalize, smooth_bump, talenti_bubble)
from src.core.inequalities.gaussian import (check_potential_condition, gaussian_lsi_check,
                                            quadratic_potential, radial_potential)
from src.core.inequalities.isoperimetric import isoperimetric_check
from src.core.inequalities.logsobolev import logsob_pipeline, logsob_quotient
from src.core.inequalities.noncollapse import noncollapse_bound, noncollapse_check
from src.core.inequalities.sobolev import sobolev_quotient

SAMPLE_PROFILE = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                              'config', 'profiles', 'sample_n3_theta0.5.csv')


class TestSobolevQuotient(unittest.TestCase):
    def test_talenti_bubble_is_extremal(self):
        params = sobolev_exponents(3, 2.0)
        for m in (euclidean(3), cone(3, 0.5)):
            for lam in (0.5, 1.0, 4.0):
                report = sobolev_quotient(m, params, talenti_bubble(params, lam))
                self.assertLess(abs(report.slack), 1e-8, (m.label, lam))
                self.assertTrue(report.passed)

    def test_sharp_bound_scales_with_avr(self):
        params = sobolev_exponents(4, 1.5)
        report = sobolev_quotient(cone(4, 0.25), params, smooth_bump())
        self.assertAlmostEqual(report.sharp_bound, aubin_talenti(4, 1.5) * 0.25 ** -0.25, places=12)

    def test_bump_has_positive_slack(self):
        params = sobolev_exponents(3, 2.0)
        report = sobolev_quotient(euclidean(3), params, smooth_bump(1.0, 3))
        self.assertGreater(report.slack, 0.0)
        self.assertEqual(report.status, 'OK')

    def test_ratio_is_dilation_invariant(self):
        params = sobolev_exponents(3, 2.0)
        f = smooth_bump(1.0, 2)
        base = sobolev_quotient(euclidean(3), params, f).ratio
        dilated = sobolev_quotient(euclidean(3), params, dilate(f, 3.0)).ratio
        self.assertLess(abs(dilated / base - 1.0), 1e-9)

    def test_unweighted_ckn_bubble_is_talentian(self):
        params = sobolev_exponents(3, 2.0)
        ckn = ckn_constants(3, 0.0, 0.0)
        for lam in (0.5, 2.0):
            f, g = ckn_bubble(ckn, lam), talenti_bubble(params, lam)
            for rho in (0.0, 0.3, 1.0, 5.0):
                self.assertAlmostEqual(f.profile(rho), g.profile(rho), places=14)
                self.assertAlmostEqual(f.derivative(rho), g.derivative(rho), places=14)

    def test_weighted_ckn_bubble_derivative(self):
        f = ckn_bubble(ckn_constants(4, 0.3, 0.5), 1.0)
        h = 1e-6
        for rho in (0.5, 1.0, 3.0):
            numeric = (f.profile(rho + h) - f.profile(rho - h)) / (2.0 * h)
            self.assertLess(abs(numeric - f.derivative(rho)), 1e-7)
        with self.assertRaises(ParameterDomainError):
            ckn_bubble(ckn_constants(4, 0.3, 0.5), 0.0)

    @given(radius=st.floats(min_value=0.2, max_value=5.0), order=st.integers(min_value=1, max_value=6),
           theta=st.sampled_from([1.0, 0.7, 0.3]))
    @settings(max_examples=20, deadline=None)
    def test_bumps_never_beat_the_sharp_constant(self, radius, order, theta):
        params = sobolev_exponents(3, 2.0)
        report = sobolev_quotient(cone(3, theta), params, smooth_bump(radius, order))
        self.assertTrue(report.passed, report.as_dict())


class TestLogSobolev(unittest.TestCase):
    def test_gaussian_bubble_is_extremal(self):
        for p in (2.0, 1.5):
            params = log_sobolev_exponents(3, p)
            for m in (euclidean(3), cone(3, 0.5)):
                f = normalize(gaussian_bubble(params, 1.0), m, p)
                report = logsob_quotient(m, params, f)
                self.assertLess(abs(report.slack), 1e-7, (p, m.label))

    def test_requires_normalization(self):
        params = log_sobolev_exponents(3, 2.0)
        with self.assertRaises(PreconditionError):
            logsob_quotient(euclidean(3), params, gaussian_bubble(params, 1.0))
        report = logsob_quotient(euclidean(3), params, gaussian_bubble(params, 1.0),
                                 auto_renormalize=True)
        self.assertLess(abs(report.slack), 1e-7)

    def test_bump_has_positive_slack(self):
        params = log_sobolev_exponents(3, 2.0)
        report = logsob_quotient(cone(3, 0.5), params, smooth_bump(), auto_renormalize=True)
        self.assertGreater(report.slack, 0.0)

    def test_transport_pipeline(self):
        params = log_sobolev_exponents(3, 2.0)
        report = logsob_pipeline(euclidean(3), params, smooth_bump(1.0, 3), auto_renormalize=True)
        self.assertTrue(report.all_hold, report.rows)
        self.assertLess(report.limit_deviation, 1e-2)
        for row in report.rows:
            self.assertGreaterEqual(row['rhs'], report.entropy - 1e-8)

    def test_transport_pipeline_on_cone(self):
        params = log_sobolev_exponents(3, 2.0)
        report = logsob_pipeline(cone(3, 0.5), params, smooth_bump(1.0, 3), auto_renormalize=True)
        self.assertTrue(report.all_hold, report.rows)
        self.assertLess(report.limit_deviation, 1e-2)

    def test_endpoint_transport_pipeline(self):
        params = log_sobolev_exponents(3, 1.0)
        for m in (euclidean(3), cone(3, 0.5)):
            report = logsob_pipeline(m, params, smooth_bump(1.0, 3), auto_renormalize=True)
            self.assertTrue(report.all_hold, (m.label, report.rows))
            self.assertLess(report.limit_deviation, 1e-6, m.label)
            self.assertEqual(report.details['weighted_gradient'], 0.0)
            lams = [row['lambda'] for row in report.rows]
            self.assertGreater(lams[-1], lams[0])

    def test_pipeline_rejects_non_compact_functions(self):
        params = log_sobolev_exponents(3, 2.0)
        with self.assertRaises(PreconditionError):
            logsob_pipeline(euclidean(3), params, gaussian_bubble(params, 1.0), auto_renormalize=True)


class TestGaussianLsi(unittest.TestCase):
    def test_normalizer(self):
        potential = quadratic_potential(euclidean(3))
        self.assertLess(abs(potential.g_v / (2.0 * math.pi) ** 1.5 - 1.0), 1e-8)
        for n, theta in ((2, 0.5), (4, 0.3)):
            potential = quadratic_potential(cone(n, theta))
            self.assertLess(abs(potential.g_v / (theta * (2.0 * math.pi) ** (n / 2.0)) - 1.0), 1e-8)

    def test_additive_constant_on_cone(self):
        m = cone(3, 0.4)
        potential = quadratic_potential(m)
        report = gaussian_lsi_check(m, potential, gaussian_profile(0.1), auto_renormalize=True)
        self.assertLess(abs(report.sharp_bound), 1e-8)
        self.assertAlmostEqual(report.details['dimension_free_constant'], -math.log(0.4), places=14)

    def test_inequality_holds(self):
        for m in (euclidean(3), cone(3, 0.5)):
            for k in (0.5, 1.0, 2.0):
                potential = quadratic_potential(m, k)
                for c in (-0.05, 0.0, 0.1, 0.4):
                    report = gaussian_lsi_check(m, potential, gaussian_profile(c), auto_renormalize=True)
                    self.assertGreaterEqual(report.slack, -1e-8, (m.label, k, c))

    def test_unit_constant_has_zero_entropy(self):
        m = cone(3, 0.5)
        report = gaussian_lsi_check(m, quadratic_potential(m), gaussian_profile(0.0))
        self.assertLess(abs(report.lhs), 1e-9)
        self.assertLess(abs(report.details['gradient_energy']), 1e-12)

    def test_requires_normalization(self):
        m = euclidean(3)
        with self.assertRaises(PreconditionError):
            gaussian_lsi_check(m, quadratic_potential(m), gaussian_profile(0.3))

    def test_potential_condition(self):
        m = euclidean(3)
        worst, _ = check_potential_condition(m, quadratic_potential(m, 2.0))
        self.assertLess(abs(worst), 1e-9)

        weak = radial_potential(m, 'weak', value=lambda rho: 0.1 * rho * rho,
                                derivative=lambda rho: 0.2 * rho,
                                second_derivative=lambda rho: 0.2)
        with self.assertRaises(HypothesisViolationError) as ctx:
            gaussian_lsi_check(m, weak, gaussian_profile(0.0), auto_renormalize=True)
        self.assertGreater(ctx.exception.details['worst_rho'], 5.0)

    def test_invalid_scale(self):
        with self.assertRaises(ParameterDomainError):
            quadratic_potential(euclidean(3), 0.0)


class TestIsoperimetric(unittest.TestCase):
    def test_equality_on_cones(self):
        for n, theta in ((2, 1.0), (3, 0.5), (5, 0.1)):
            report = isoperimetric_check(cone(n, theta), np.geomspace(1e-3, 1e3, 40))
            self.assertTrue(report.passed)
            for row in report.rows:
                self.assertLess(abs(row['relative_slack']), 1e-12, (n, theta, row))
                self.assertLessEqual(abs(row['slack']), 1e-12 * row['perimeter'], (n, theta, row))

    def test_sample_profile_satisfies_bound(self):
        m = from_table(3, load_profile_table(SAMPLE_PROFILE))
        report = isoperimetric_check(m, np.geomspace(1e-2, 1e3, 60))
        self.assertGreaterEqual(report.min_relative_slack, -1e-2)
        self.assertEqual(sorted(report.rows[0]), ['bound', 'perimeter', 'relative_slack', 'rho', 'slack'])

    def test_slack_is_perimeter_minus_bound(self):
        m = from_table(3, load_profile_table(SAMPLE_PROFILE))
        report = isoperimetric_check(m, np.geomspace(1e-1, 1e2, 7))
        for row in report.rows:
            self.assertEqual(row['slack'], row['perimeter'] - row['bound'])
            self.assertAlmostEqual(row['relative_slack'], row['slack'] / row['perimeter'], places=15)
        self.assertEqual(report.min_slack, min(row['slack'] for row in report.rows))

    def test_invalid_grid(self):
        with self.assertRaises(ParameterDomainError):
            isoperimetric_check(euclidean(3), [])
        with self.assertRaises(ParameterDomainError):
            isoperimetric_check(euclidean(3), [0.0, 1.0])


class TestNonCollapse(unittest.TestCase):
    def test_bound_values(self):
        k_ab = ckn_constants(3, 0.0, 0.0).k_ab
        self.assertAlmostEqual(noncollapse_bound(3, 0.0, 0.0, 2.0 * k_ab), 0.125, places=14)
        self.assertEqual(noncollapse_bound(3, 0.0, 0.0, k_ab), 1.0)

    def test_constant_below_sharp_value_is_clamped(self):
        k_ab = ckn_constants(3, 0.0, 0.0).k_ab
        with self.assertLogs('NonCollapse', level='WARNING'):
            self.assertEqual(noncollapse_bound(3, 0.0, 0.0, 0.5 * k_ab), 1.0)

    def test_recovers_cone_aperture(self):
        ckn = ckn_constants(4, 0.3, 0.5)
        c = ckn.k_ab * 0.3 ** (-ckn.weight_gap / 4.0)
        self.assertLess(abs(noncollapse_bound(4, 0.3, 0.5, c) - 0.3), 1e-12)

    def test_check_on_cone(self):
        k_ab = ckn_constants(3, 0.0, 0.0).k_ab
        grid = np.geomspace(1e-2, 1e2, 20)
        report = noncollapse_check(cone(3, 0.5), 0.0, 0.0, k_ab * 0.5 ** (-1.0 / 3.0), grid)
        self.assertTrue(report.passed)
        self.assertEqual(report.status, 'OK')

        report = noncollapse_check(cone(3, 0.5), 0.0, 0.0, 1.01 * k_ab, grid)
        self.assertFalse(report.passed)
        self.assertEqual(report.status, 'ERROR')

    def test_invalid_constant(self):
        with self.assertRaises(ParameterDomainError):
            noncollapse_bound(3, 0.0, 0.0, -1.0)


if __name__ == '__main__':
    unittest.main()
