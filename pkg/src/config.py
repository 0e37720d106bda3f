import os
import sys
import logging
from dotenv import load_dotenv

from src.errors import ConfigError

# Environment set by the caller takes precedence over .env
load_dotenv()


def _get_float(name: str, default: str) -> float:
    return float(os.getenv(name, default))


def _get_int(name: str, default: str) -> int:
    return int(os.getenv(name, default))


# Device link
HOST = os.getenv("GUIDE_HOST", "127.0.0.1")
PORT = _get_int("GUIDE_PORT", "5321")
HEARTBEAT_SECONDS = _get_float("GUIDE_HEARTBEAT_SECONDS", "1.0")
LINK_TIMEOUT_SECONDS = _get_float("GUIDE_LINK_TIMEOUT_SECONDS", "3.5")

# Perception
MIN_CONFIDENCE = _get_float("GUIDE_MIN_CONFIDENCE", "0.5")
DISPARITY_WORKERS = _get_int("GUIDE_DISPARITY_WORKERS", "1")

# Speech output
SPEAKING_RATE = _get_float("GUIDE_SPEAKING_RATE", "0.8")

# Calibration rig
SQUARE_SIZE_M = _get_float("GUIDE_SQUARE_SIZE_M", "0.03")
BOARD_COLS = _get_int("GUIDE_BOARD_COLS", "5")
BOARD_ROWS = _get_int("GUIDE_BOARD_ROWS", "4")
PIXEL_SIZE_MM = _get_float("GUIDE_PIXEL_SIZE_MM", "0.003")
IMAGE_WIDTH = _get_int("GUIDE_IMAGE_WIDTH", "640")
IMAGE_HEIGHT = _get_int("GUIDE_IMAGE_HEIGHT", "480")

LOG_LEVEL = os.getenv("GUIDE_LOG_LEVEL", "INFO")


def validate_config():
    """
    Check every configured value against its allowed range.

    Raises ConfigError listing all offending variables at once.
    """
    problems = []
    if not 0 < PORT < 65536:
        problems.append(f"GUIDE_PORT={PORT} (must be 1-65535)")
    if HEARTBEAT_SECONDS <= 0:
        problems.append(f"GUIDE_HEARTBEAT_SECONDS={HEARTBEAT_SECONDS} (must be > 0)")
    if LINK_TIMEOUT_SECONDS <= HEARTBEAT_SECONDS:
        problems.append(f"GUIDE_LINK_TIMEOUT_SECONDS={LINK_TIMEOUT_SECONDS} (must exceed the heartbeat interval)")
    if not 0 <= MIN_CONFIDENCE <= 1:
        problems.append(f"GUIDE_MIN_CONFIDENCE={MIN_CONFIDENCE} (must be in [0, 1])")
    if DISPARITY_WORKERS < 1:
        problems.append(f"GUIDE_DISPARITY_WORKERS={DISPARITY_WORKERS} (must be >= 1)")
    if not 0 < SPEAKING_RATE <= 1:
        problems.append(f"GUIDE_SPEAKING_RATE={SPEAKING_RATE} (must be in (0, 1])")
    if SQUARE_SIZE_M <= 0:
        problems.append(f"GUIDE_SQUARE_SIZE_M={SQUARE_SIZE_M} (must be > 0)")
    if BOARD_COLS < 2 or BOARD_ROWS < 2:
        problems.append(f"GUIDE_BOARD_COLS/ROWS={BOARD_COLS}x{BOARD_ROWS} (each must be >= 2)")
    if PIXEL_SIZE_MM <= 0:
        problems.append(f"GUIDE_PIXEL_SIZE_MM={PIXEL_SIZE_MM} (must be > 0)")
    if IMAGE_WIDTH < 1 or IMAGE_HEIGHT < 1:
        problems.append(f"GUIDE_IMAGE_WIDTH/HEIGHT={IMAGE_WIDTH}x{IMAGE_HEIGHT} (must be >= 1)")

    if problems:
        raise ConfigError(
            f"\n{'=' * 60}\n"
            f"CONFIGURATION ERROR - Invalid Environment Variables\n"
            f"{'=' * 60}\n"
            + "\n".join(f"  - {p}" for p in problems)
            + f"\n\nCurrent .env location: {os.path.abspath('.env')}\n{'=' * 60}"
        )


def configure_logging(level: str = None):
    """Send log records to stderr; stdout stays reserved for results and transcripts."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel((level or LOG_LEVEL).upper())
