import logging
import os
import sys

ROOT = "rm_lab"
FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def _numeric_level(level):
    name = level or os.environ.get("LOG_LEVEL", "WARNING")
    return getattr(logging, name.upper(), logging.WARNING)


def setup_logging(name=ROOT, level=None):
    """
    Logger for one part of the tool: setup_logging("rpa") is "rm_lab.rpa".

    Only the rm_lab logger owns a handler, on stderr, since stdout carries words,
    CSV and JSON. Its level comes from LOG_LEVEL (default WARNING) unless given.
    """
    root = logging.getLogger(ROOT)
    if not any(h.get_name() == ROOT for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.set_name(ROOT)
        handler.setFormatter(logging.Formatter(FORMAT))
        root.addHandler(handler)
        root.setLevel(_numeric_level(level))
        root.propagate = False

    logger = root if name == ROOT else root.getChild(name)
    if level is not None:
        logger.setLevel(_numeric_level(level))
    return logger
