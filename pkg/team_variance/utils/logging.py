import logging
import sys
from typing import Optional

import structlog

from team_variance.settings import get_settings

_PROCESSORS = [
    structlog.contextvars.merge_contextvars,
    structlog.processors.add_log_level,
    structlog.processors.StackInfoRenderer(),
    structlog.dev.set_exc_info,
    structlog.processors.TimeStamper(fmt="%Y-%m-%d %H:%M:%S", utc=False),
    structlog.dev.ConsoleRenderer(),
]


def _filtering_logger(level: str):
    return structlog.make_filtering_bound_logger(logging.getLevelName(level.upper()))


# stderr keeps CSV/JSON written to stdout clean
structlog.configure_once(
    processors=_PROCESSORS,
    wrapper_class=_filtering_logger(get_settings().log_level),
    context_class=dict,
    logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
    cache_logger_on_first_use=False,
)


def configure_logging(level: Optional[str] = None) -> None:
    """Reconfigure the filtering level, defaulting to ``Settings.log_level``."""
    structlog.configure(
        processors=_PROCESSORS,
        wrapper_class=_filtering_logger(level or get_settings().log_level),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    return structlog.get_logger(name)
