import logging
import os
import shutil
import tempfile
import unittest
import uuid
from logging.handlers import RotatingFileHandler

from src.utils.logger import get_implementation_logger, resolve_log_dir, setup_logger


class TestLogger(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.name = f"TestLogger{uuid.uuid4().hex[:8]}"

    def tearDown(self):
        logger = logging.getLogger(self.name)
        for handler in list(logger.handlers):
            handler.close()
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_file_created_on_first_record(self):
        logger = setup_logger(self.name, log_dir=self.temp_dir)
        log_file = os.path.join(self.temp_dir, f"{self.name.lower()}.log")
        self.assertFalse(os.path.exists(log_file))

        logger.info("scan finished")
        for handler in logger.handlers:
            handler.flush()
        with open(log_file, 'r', encoding='utf-8') as f:
            self.assertIn("scan finished", f.read())

    def test_loggers_are_cached(self):
        first = setup_logger(self.name, log_dir=self.temp_dir)
        self.assertIs(first, setup_logger(self.name))
        self.assertFalse(first.propagate)

    def test_setup_is_recorded(self):
        setup_logger(self.name, log_dir=self.temp_dir)
        setup_log = get_implementation_logger()
        self.assertIs(setup_log, get_implementation_logger(self.temp_dir))
        self.assertFalse(setup_log.propagate)
        self.assertEqual(setup_log.level, logging.INFO)

    def test_handlers(self):
        logger = setup_logger(self.name, log_dir=self.temp_dir)
        levels = sorted(handler.level for handler in logger.handlers)
        self.assertEqual(levels, [logging.DEBUG, logging.ERROR])
        rotating = [h for h in logger.handlers if isinstance(h, RotatingFileHandler)][0]
        self.assertEqual(rotating.maxBytes, 512 * 1024)
        self.assertEqual(rotating.backupCount, 3)

    def test_log_dir_resolution(self):
        self.assertEqual(resolve_log_dir(self.temp_dir), self.temp_dir)
        previous = os.environ.get('SOBOLEV_LAB_LOG_DIR')
        os.environ['SOBOLEV_LAB_LOG_DIR'] = self.temp_dir
        try:
            self.assertEqual(resolve_log_dir(), self.temp_dir)
        finally:
            if previous is None:
                os.environ.pop('SOBOLEV_LAB_LOG_DIR')
            else:
                os.environ['SOBOLEV_LAB_LOG_DIR'] = previous


if __name__ == '__main__':
    unittest.main()
