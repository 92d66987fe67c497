from ._get_logger import get_logger, get_root_logger, set_console_level

__all__ = ["get_logger", "get_root_logger", "set_console_level"]
