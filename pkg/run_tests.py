import logging
import os
import sys
import unittest


def run_tests() -> bool:
    # Suppress logging output during tests
    logging.getLogger().setLevel(logging.CRITICAL)
    os.environ.setdefault('SOBOLEV_LAB_LOG_DIR', os.path.join('lab_logs', 'tests'))

    # Discover all tests in the 'tests' directory
    loader = unittest.TestLoader()
    suite = loader.discover('tests')

    # Open a file to write the test results
    with open('test_results.txt', 'w', encoding='utf-8') as f:
        runner = unittest.TextTestRunner(stream=f, verbosity=2)
        result = runner.run(suite)
    return result.wasSuccessful()


if __name__ == '__main__':
    sys.exit(0 if run_tests() else 1)
