from typing import Tuple

from src import config
from src.errors import ConfigError


def parse_endpoint(text: str) -> Tuple[str, int]:
    """"host:port", ":port" or "port" into (host, port); the host defaults to GUIDE_HOST."""
    host, sep, port = text.strip().rpartition(":")
    if not sep:
        host = ""
    try:
        number = int(port)
    except ValueError:
        raise ConfigError(f"endpoint {text!r} has no numeric port")
    if not 0 <= number < 65536:
        raise ConfigError(f"endpoint port {number} outside 0-65535")
    return host or config.HOST, number


def format_endpoint(endpoint: Tuple[str, int]) -> str:
    return f"{endpoint[0]}:{endpoint[1]}"
