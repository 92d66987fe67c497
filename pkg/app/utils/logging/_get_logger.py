from __future__ import annotations

from logging import StreamHandler, config, getLevelName, getLogger
from typing import TYPE_CHECKING

try:
    from .log_config import LOG_CONFIG
except ImportError:
    # Fallback for when the module is run directly
    from log_config import LOG_CONFIG

if TYPE_CHECKING:
    from logging import Logger


config.dictConfig(LOG_CONFIG)


def get_logger(name: str) -> Logger:
    return getLogger(name)


def get_root_logger() -> Logger:
    return getLogger()


def set_console_level(level: str | int) -> None:
    """コンソール出力のログレベルを変更する.

    Args:
        level (str | int): "DEBUG" などのレベル名、または数値.
    """
    resolved = getLevelName(level.upper()) if isinstance(level, str) else level
    if not isinstance(resolved, int):
        msg = f"Unknown log level: {level}"
        raise ValueError(msg)
    for logger in (get_root_logger(), getLogger("__main__")):
        for handler in logger.handlers:
            if type(handler) is StreamHandler:
                handler.setLevel(resolved)


if __name__ == "__main__":
    logger = get_logger(__name__)
    logger.info("This is an info message.")
    set_console_level("WARNING")
    logger.info("This message is hidden on the console.")
    get_root_logger().warning("This is a warning message from the root logger.")
