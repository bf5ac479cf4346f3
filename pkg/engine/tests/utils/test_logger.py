"""
Tests for the engine logging helpers.
"""

import io
import logging

import numpy as np

from engine.src.utils.logger import ExtraDataFormatter, UTF8StreamHandler, get_logger
from engine.tests.base import BaseTest


class TestExtraDataFormatter(BaseTest):
    def _format(self, data):
        record = logging.LogRecord(
            "engine.test", logging.INFO, __file__, 1, "Ran", None, None
        )
        if data is not None:
            record.data = data
        return ExtraDataFormatter("%(message)s").format(record)

    def test_sorted_pairs(self):
        self.assertEqual(self._format({"b": 2, "a": "x"}), "Ran | a=x | b=2")

    def test_numpy_and_float_values(self):
        line = self._format({"loss": np.float64(0.123456789), "n": np.int64(4)})
        self.assertEqual(line, "Ran | loss=0.123457 | n=4")

    def test_without_data(self):
        self.assertEqual(self._format(None), "Ran")


class TestLoggers(BaseTest):
    def test_handler_writes_formatted_line(self):
        stream = io.StringIO()
        handler = UTF8StreamHandler(stream)
        handler.setFormatter(ExtraDataFormatter("%(levelname)s %(message)s"))
        logger = logging.getLogger("engine.test.handler")
        logger.addHandler(handler)
        logger.propagate = False
        try:
            logger.warning("Cell failed", extra={"data": {"cell": "20_GL"}})
        finally:
            logger.removeHandler(handler)
        self.assertEqual(stream.getvalue(), "WARNING Cell failed | cell=20_GL\n")

    def test_get_logger_installs_one_handler(self):
        logger = get_logger("engine.test.single")
        again = get_logger("engine.test.single")
        self.assertIs(logger, again)
        self.assertEqual(len(logger.handlers), 1)
        self.assertFalse(logger.propagate)
