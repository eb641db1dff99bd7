import json
import os
import shutil
import tempfile
import unittest

from click.testing import CliRunner

from src.core.constants import aubin_talenti
from sobolev_lab import EXIT_FAILED, EXIT_OK, EXIT_USAGE, cli, main

PROFILE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                           'config', 'profiles')


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.config_dir = os.path.join(self.temp_dir, 'config')
        self.out_dir = os.path.join(self.temp_dir, 'out')
        os.makedirs(self.config_dir)

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def run_lab(self, *args):
        return main(list(args) + ['--config-dir', self.config_dir, '--out', self.out_dir])

    def load(self, name):
        with open(os.path.join(self.out_dir, name), 'r', encoding='utf-8') as f:
            return f.read()

    def test_constants(self):
        self.assertEqual(self.run_lab('constants'), EXIT_OK)
        document = json.loads(self.load('constants.json'))
        rows = document['report']['reports']['constants']['rows']
        endpoint = [row for row in rows if row['p'] == 1.0][0]
        self.assertAlmostEqual(endpoint['AT'], aubin_talenti(3, 1.0), places=14)
        self.assertEqual(document['config']['n'], 3)
        self.assertTrue(os.path.exists(os.path.join(self.out_dir, 'constants_constants.csv')))

    def test_reports_are_deterministic(self):
        self.assertEqual(self.run_lab('constants', '--n', '4'), EXIT_OK)
        first = self.load('constants.json')
        self.assertEqual(self.run_lab('constants', '--n', '4'), EXIT_OK)
        self.assertEqual(first, self.load('constants.json'))

    def test_settings_file_and_flags(self):
        with open(os.path.join(self.config_dir, 'settings.json'), 'w', encoding='utf-8') as f:
            json.dump({'n': 5}, f)
        self.assertEqual(self.run_lab('constants'), EXIT_OK)
        self.assertEqual(json.loads(self.load('constants.json'))['config']['n'], 5)
        self.assertEqual(self.run_lab('constants', '--n', '6'), EXIT_OK)
        self.assertEqual(json.loads(self.load('constants.json'))['config']['n'], 6)

    def test_bishop_gromov_violation_fails(self):
        spec = 'table:' + os.path.join(PROFILE_DIR, 'bad_bishop_gromov_n3.csv')
        self.assertEqual(self.run_lab('manifold', 'validate', '--manifold', spec), EXIT_FAILED)
        document = json.loads(self.load('manifold_validate.json'))
        self.assertEqual(document['report']['status'], 'ERROR')

    def test_cone_manifold_passes(self):
        self.assertEqual(self.run_lab('manifold', 'validate', '--manifold', 'cone:0.5'), EXIT_OK)

    def test_sobolev_scan(self):
        code = self.run_lab('scan', 'sobolev', '--manifold', 'cone:0.5', '--lambda-count', '6')
        self.assertEqual(code, EXIT_OK)
        csv_text = self.load('scan_sobolev_scan_sobolev.csv')
        lines = csv_text.splitlines()
        self.assertEqual(lines[0], 'lambda,value,error')
        self.assertEqual(len(lines), 7)

    def test_noncollapse(self):
        self.assertEqual(self.run_lab('noncollapse', '--manifold', 'cone:0.4'), EXIT_OK)

    def test_usage_errors(self):
        self.assertEqual(self.run_lab('frobnicate'), EXIT_USAGE)
        self.assertEqual(self.run_lab('constants', '--n', '1'), EXIT_USAGE)
        self.assertEqual(self.run_lab('constants', '--format', 'xml'), EXIT_USAGE)
        self.assertEqual(self.run_lab('constants', '--manifold', 'sphere'), EXIT_USAGE)

    def test_out_of_domain_inputs(self):
        self.assertEqual(self.run_lab('scan', 'sobolev', '--n', '3', '--p', '5'), EXIT_USAGE)
        self.assertEqual(self.run_lab('scan', 'ckn', '--a', '5', '--b', '0.2'), EXIT_USAGE)
        self.assertEqual(self.run_lab('manifold', 'validate', '--manifold', 'cone:1.5'), EXIT_USAGE)
        missing = os.path.join(self.temp_dir, 'missing.csv')
        self.assertEqual(self.run_lab('manifold', 'validate', '--manifold', f'table:{missing}'),
                         EXIT_USAGE)
        document = json.loads(self.load('manifold_validate.json'))
        self.assertTrue(document['report']['invalid_input'])
        self.assertEqual(document['report']['details']['error'], 'ProfileFormatError')

    def test_csv_summary(self):
        runner = CliRunner()
        result = runner.invoke(cli, ['constants', '--format', 'csv', '--config-dir', self.config_dir,
                                     '--out', self.out_dir])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn('constants_constants.csv', result.output)


if __name__ == '__main__':
    unittest.main()
