import sys
from typing import Optional

from loguru import logger

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)

_configured = False


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """
    Install the console sink and, optionally, a rotating file sink

    Args:
        level: Minimum level for the console sink
        log_file: Path of a log file; no file sink when omitted
    """
    global _configured
    logger.remove()  # Remove default handler

    logger.add(sys.stderr, level=level, format=CONSOLE_FORMAT)

    if log_file:
        logger.add(
            log_file,
            level="DEBUG",
            rotation="10 MB",
            retention="7 days",
            compression="zip",
        )

    _configured = True


def get_logger(name: str):
    """
    Get a logger bound to a module of the package

    Args:
        name: Name of the logger (typically __name__ of the module)

    Returns:
        Configured logger instance
    """
    if not _configured:
        configure_logging()
    return logger.bind(module=name)
