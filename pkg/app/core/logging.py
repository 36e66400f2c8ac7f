import logging
import sys

from app.core.config import settings

def setup_logging(level: str | None = None):
    # stdout carries the JSON / CSV output, logs go to stderr
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        stream=sys.stderr,
    )
