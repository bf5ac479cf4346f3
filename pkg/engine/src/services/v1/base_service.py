import logging
from typing import Any

from ...utils.logger import get_logger


class BaseService:
    """Base class of the engine services; gives every subclass a module logger."""

    logger: logging.Logger

    @classmethod
    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__()
        cls.logger = get_logger(cls.__module__)

    def _log(self, level: int, message: str, **data: Any) -> None:
        """Log ``message`` with ``data`` rendered as key=value pairs."""
        if self.logger.isEnabledFor(level):
            self.logger.log(level, message, extra={"data": data}, stacklevel=2)


__all__ = ["BaseService"]
