from __future__ import annotations

__all__ = [
    "LOGGER_NAME",
    "SeededLogger",
    "configure_logging",
    "get_logger",
    "get_seeded_logger",
]

import logging
from typing import Any, MutableMapping


LOGGER_NAME = "pychoquet"


class _ReadableFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        if not hasattr(record, "component"):
            record.component = record.name.rsplit(".", 1)[-1]
        return super().format(record)


def configure_logging(level: str | int = logging.INFO) -> logging.Logger:
    """
    Attach the readable stream handler to the package logger.

    Calling it again only updates the level; the handler is installed once.

    Args:
        level (str | int): A logging level or its name, e.g. ``"DEBUG"``.

    Returns:
        logging.Logger: The package logger.
    """
    logger = logging.getLogger(LOGGER_NAME)

    if isinstance(level, str):
        normalized_level = getattr(logging, level.strip().upper(), logging.INFO)
    else:
        normalized_level = level

    logger.setLevel(normalized_level)

    if not any(getattr(handler, "_pychoquet_handler", False) for handler in logger.handlers):
        handler = logging.StreamHandler()
        handler._pychoquet_handler = True  # type: ignore[attr-defined]
        handler.setFormatter(
            _ReadableFormatter(
                fmt="%(asctime)s | %(levelname)-7s | %(component)s | %(message)s",
                datefmt="%H:%M:%S",
            )
        )
        logger.addHandler(handler)

    logger.propagate = True
    return logger


def get_logger(name: str | None = None) -> logging.Logger:
    base_logger = logging.getLogger(LOGGER_NAME)
    if name:
        return base_logger.getChild(name)
    return base_logger


class SeededLogger(logging.LoggerAdapter):
    """
    Logger adapter that prefixes every message with the seed of a reproducible run.

    Extra context such as the trial number is rendered after the seed, so a
    failing round trip can be replayed from its log line alone.

    Example:
        .. code-block:: python

            >>> log = get_seeded_logger("suite", seed=11, trial=0)
            >>> log.warning("stage=%s passed=%s", "axioms", False)
            # [seed=11 trial=0] stage=axioms passed=False
    """

    def process(self, msg: Any, kwargs: MutableMapping[str, Any]) -> tuple[Any, MutableMapping[str, Any]]:
        context = " ".join(f"{key}={value}" for key, value in self.extra.items())
        return f"[{context}] {msg}", kwargs


def get_seeded_logger(name: str | None = None, seed: int = 0, **context: Any) -> SeededLogger:
    return SeededLogger(get_logger(name), {"seed": seed, **context})
