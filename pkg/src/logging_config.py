import sys

from loguru import logger

LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {name}:{function} - {message}"


def configure_logging(level: str = "INFO") -> None:
    """
    Replace loguru's default sink with a single stderr sink.

    Args:
        level (str): minimum level to emit, e.g. "DEBUG" or "WARNING".
    """
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)
