import logging
import sys
from typing import Optional

from ..config.settings import settings


def get_logger(name: str, level: Optional[str] = None) -> logging.Logger:
    """Module logger writing to stderr; level defaults to settings.LOG_LEVEL."""
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO))

    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger
