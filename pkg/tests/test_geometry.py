import math
import os
import shutil
import tempfile
import unittest

import numpy as np

from src.core.constants import volume_unit_ball
from src.core.errors import (InsufficientDataError, InvalidDimensionError, ParameterDomainError,
                             ProfileFormatError)
from src.core.geometry.manifold import (asymptotic_volume_ratio, cone, construct_manifold, euclidean,
                                        from_table, layer_cake_integral, parse_manifold_spec,
                                        radial_integral, validate_bishop_gromov)
from src.core.geometry.profile_table import (VolumeProfileTable, load_profile_table, sample_profile,
                                             write_profile_table)
from src.core.numerics.quadrature import TailClass

PROFILE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                           'config', 'profiles')
SAMPLE_PROFILE = os.path.join(PROFILE_DIR, 'sample_n3_theta0.5.csv')
BAD_PROFILE = os.path.join(PROFILE_DIR, 'bad_bishop_gromov_n3.csv')


class TestAnalyticManifolds(unittest.TestCase):
    def test_euclidean_volume_and_area(self):
        m = euclidean(3)
        self.assertEqual(asymptotic_volume_ratio(m), 1.0)
        self.assertAlmostEqual(m.volume(2.0), 4.0 * math.pi / 3.0 * 8.0, places=12)
        self.assertAlmostEqual(m.area(2.0), 4.0 * math.pi * 4.0, places=12)
        self.assertAlmostEqual(m.log_area_derivative(2.0), 1.0, places=14)
        self.assertFalse(m.is_diagnostic)

    def test_cone_scales_volume(self):
        m = cone(4, 0.25)
        rho = np.array([0.1, 1.0, 10.0])
        np.testing.assert_allclose(m.volume(rho), 0.25 * volume_unit_ball(4) * rho ** 4, rtol=1e-14)
        np.testing.assert_allclose(m.volume_ratio(rho), 0.25)
        self.assertEqual(m.label, 'cone(4, 0.25)')

    def test_invalid_specs(self):
        with self.assertRaises(ParameterDomainError):
            cone(3, 0.0)
        with self.assertRaises(ParameterDomainError):
            cone(3, 1.5)
        with self.assertRaises(InvalidDimensionError):
            euclidean(1)

    def test_parse_manifold_spec(self):
        self.assertEqual(construct_manifold(parse_manifold_spec('euclidean', 3)).label, 'euclidean(3)')
        self.assertEqual(parse_manifold_spec(' cone:0.5 ', 3).theta, 0.5)
        with self.assertRaises(ParameterDomainError):
            parse_manifold_spec('cone:abc', 3)
        with self.assertRaises(ParameterDomainError):
            parse_manifold_spec('sphere', 3)

    def test_radial_integral_of_gaussian(self):
        for n in (2, 3, 4, 5):
            result = radial_integral(euclidean(n), lambda rho: math.exp(-rho * rho),
                                     tail=TailClass.exponential())
            self.assertLess(abs(result.value / math.pi ** (n / 2.0) - 1.0), 1e-9, n)

    def test_layer_cake_matches_radial_integral(self):
        m = cone(3, 0.5)
        direct = radial_integral(m, lambda rho: math.exp(-rho * rho)).value
        layered = layer_cake_integral(m, lambda rho: -2.0 * rho * math.exp(-rho * rho)).value
        self.assertLess(abs(layered / direct - 1.0), 1e-10)

    def test_bishop_gromov_holds_on_cones(self):
        report = validate_bishop_gromov(cone(3, 0.3), np.geomspace(1e-3, 1e3, 50))
        self.assertTrue(report.passed)
        self.assertIsNone(report.violation_interval)


class TestProfileTables(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_sample_profile_is_valid(self):
        m = from_table(3, load_profile_table(SAMPLE_PROFILE))
        self.assertTrue(m.is_diagnostic)
        self.assertLess(abs(m.avr - 0.5), 1e-4)
        report = validate_bishop_gromov(m, np.geomspace(1e-3, 1e5, 200))
        self.assertTrue(report.passed, report.as_dict())

    def test_table_interpolation_reproduces_rows(self):
        table = load_profile_table(SAMPLE_PROFILE)
        m = from_table(3, table)
        np.testing.assert_allclose(m.volume(table.rho), table.volume, rtol=1e-12)

    def test_table_area_is_volume_derivative(self):
        m = from_table(3, sample_profile(3, 0.5, np.geomspace(1e-3, 1e4, 400)))
        rho, h = 2.0, 1e-4
        derivative = (m.volume(rho + h) - m.volume(rho - h)) / (2.0 * h)
        self.assertLess(abs(m.area(rho) / derivative - 1.0), 1e-3)

    def test_non_monotone_profile_locates_violation(self):
        m = from_table(3, load_profile_table(BAD_PROFILE))
        report = validate_bishop_gromov(m, np.geomspace(1e-2, 1e3, 100))
        self.assertFalse(report.passed)
        lo, hi = report.violation_interval
        self.assertGreaterEqual(lo, 0.7)
        self.assertLessEqual(lo, 1.05)
        self.assertGreaterEqual(hi, 3.5)
        self.assertLessEqual(hi, 4.5)
        self.assertTrue(lo <= report.worst_rho <= hi)

    def test_round_trip_through_csv(self):
        table = sample_profile(3, 0.7, np.geomspace(1e-2, 1e3, 60))
        path = write_profile_table(table, os.path.join(self.temp_dir, 'profile.csv'),
                                   comment='theta = 0.7')
        loaded = load_profile_table(path)
        np.testing.assert_array_equal(loaded.rho, table.rho)
        np.testing.assert_array_equal(loaded.volume, table.volume)

    def test_malformed_tables(self):
        with self.assertRaises(ProfileFormatError):
            VolumeProfileTable(rho=np.array([1.0, 2.0, 2.0, 3.0]), volume=np.array([1.0, 2.0, 3.0, 4.0]))
        with self.assertRaises(ProfileFormatError):
            VolumeProfileTable(rho=np.array([1.0, 2.0, 3.0, 4.0]), volume=np.array([1.0, 3.0, 2.0, 4.0]))
        with self.assertRaises(ProfileFormatError):
            VolumeProfileTable(rho=np.array([1.0, 2.0]), volume=np.array([1.0, 2.0]))
        with self.assertRaises(ProfileFormatError):
            load_profile_table(os.path.join(self.temp_dir, 'missing.csv'))

        path = os.path.join(self.temp_dir, 'header.csv')
        with open(path, 'w', encoding='utf-8') as f:
            f.write('radius,vol\n1,1\n2,8\n3,27\n4,64\n')
        with self.assertRaises(ProfileFormatError):
            load_profile_table(path)

    def test_short_tail_needs_hint(self):
        table = sample_profile(3, 0.5, np.geomspace(1.0, 10.0, 20))
        with self.assertRaises(InsufficientDataError):
            from_table(3, table)

        hinted = VolumeProfileTable(rho=table.rho, volume=table.volume, tail_exponent_hint=1.0)
        m = from_table(3, hinted)
        self.assertGreater(m.avr, 0.0)
        self.assertLessEqual(m.avr, 1.0)


if __name__ == '__main__':
    unittest.main()
