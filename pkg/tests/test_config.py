import pytest

from src import config
from src.errors import ConfigError


def test_defaults_are_valid():
    config.validate_config()


@pytest.mark.parametrize("name, value, variable", [
    ("PORT", 0, "GUIDE_PORT"),
    ("HEARTBEAT_SECONDS", 0.0, "GUIDE_HEARTBEAT_SECONDS"),
    ("LINK_TIMEOUT_SECONDS", 0.5, "GUIDE_LINK_TIMEOUT_SECONDS"),
    ("MIN_CONFIDENCE", 1.5, "GUIDE_MIN_CONFIDENCE"),
    ("SPEAKING_RATE", 0.0, "GUIDE_SPEAKING_RATE"),
    ("BOARD_COLS", 1, "GUIDE_BOARD_COLS"),
])
def test_invalid_setting_is_named(monkeypatch, name, value, variable):
    monkeypatch.setattr(config, name, value)
    with pytest.raises(ConfigError) as exc:
        config.validate_config()
    assert variable in str(exc.value)


def test_all_problems_reported_together(monkeypatch):
    monkeypatch.setattr(config, "PORT", 70000)
    monkeypatch.setattr(config, "DISPARITY_WORKERS", 0)
    with pytest.raises(ConfigError) as exc:
        config.validate_config()
    message = str(exc.value)
    assert "GUIDE_PORT" in message and "GUIDE_DISPARITY_WORKERS" in message
    assert "CONFIGURATION ERROR" in message
