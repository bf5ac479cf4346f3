"""
Common base test classes for all engine tests.
"""

import asyncio
import logging
import shutil
import tempfile
import unittest
from pathlib import Path
from typing import Any, Awaitable, Coroutine, TypeVar, Union

import numpy as np

from engine.src.utils.logger import DEFAULT_FORMAT

T = TypeVar("T")


class BaseTest(unittest.TestCase):
    """Per-test logger, private event loop and scratch directory."""

    def _setup_test_logger(self):
        test_class_name = self.__class__.__name__
        test_method_name = getattr(self, "_testMethodName", "unknown_test")
        logger_name = f"{test_class_name}.{test_method_name}"

        self.logger = logging.getLogger(logger_name)
        self.logger.setLevel(logging.INFO)

        if not self.logger.handlers:
            handler = logging.StreamHandler()
            handler.setFormatter(logging.Formatter(DEFAULT_FORMAT))
            self.logger.addHandler(handler)

    def setUp(self):
        self.loop = asyncio.new_event_loop()
        asyncio.set_event_loop(self.loop)
        self._setup_test_logger()
        self._tmp_dir = None

    def tearDown(self):
        pending = asyncio.all_tasks(self.loop)
        for task in pending:
            task.cancel()
        if pending:
            self.loop.run_until_complete(
                asyncio.gather(*pending, return_exceptions=True)
            )
        self.loop.close()
        if self._tmp_dir is not None:
            shutil.rmtree(self._tmp_dir, ignore_errors=True)

    def run_async(self, coro: Union[Coroutine[Any, Any, T], Awaitable[T]]) -> T:
        """Run an async coroutine in the test loop and return the result with proper typing."""
        return self.loop.run_until_complete(coro)

    @property
    def tmp_dir(self) -> Path:
        """A scratch directory removed after the test."""
        if self._tmp_dir is None:
            self._tmp_dir = Path(tempfile.mkdtemp(prefix="carbon-stress-"))
        return self._tmp_dir

    def assertArrayClose(
        self, actual, expected, atol: float = 1e-12, rtol: float = 0.0
    ):
        np.testing.assert_allclose(
            np.asarray(actual, dtype=float),
            np.asarray(expected, dtype=float),
            atol=atol,
            rtol=rtol,
        )


__all__ = ["BaseTest"]
