import logging
import os
import sys
import warnings


def silence_warnings_and_logs() -> None:
    """Suppress Python warnings and noisy third-party loggers.

    Call as early as possible in the process (before importing third-party
    libraries) to minimize startup noise.
    """
    os.environ.setdefault("PYTHONWARNINGS", "ignore")
    warnings.filterwarnings("ignore")
    warnings.simplefilter("ignore")

    logging.captureWarnings(True)
    for _name in ("aiohttp", "httpx", "pydantic", "litellm", "agency_swarm", "openai"):
        logging.getLogger(_name).setLevel(logging.ERROR)


def configure_logging(verbose: int = 0) -> None:
    """Send log records to stderr so stdout carries only the run's output.

    ``verbose`` 0 shows warnings, 1 adds progress, 2 adds search details.
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
