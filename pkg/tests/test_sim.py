import dataclasses
import os

import pytest

from src.errors import ConfigError
from src.sim import DEMO_TRANSCRIPT, build_demo_fixture, load_simulation_config, run_simulation, stream_reports
from src.sim.timing import CUMULATIVE, SETUP, StageTimer
from src.wire.codec import ReportBatch


@pytest.fixture(scope="module")
def demo_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("demo")
    build_demo_fixture(str(directory))
    return directory


@pytest.fixture
def demo_config(demo_dir):
    return load_simulation_config(str(demo_dir / "simulation.env"))


def test_demo_transcript(demo_config):
    result = run_simulation(demo_config)
    assert result.transcript == DEMO_TRANSCRIPT
    assert result.exit_code == 0


def test_timing_rows(demo_config):
    timing = run_simulation(demo_config).timing
    names = [name for name, _ in timing.rows]
    assert len(names) == 5
    assert names[0] == SETUP == "setup"
    assert names[-1] == CUMULATIVE
    assert all(seconds >= 0 for _, seconds in timing.rows)
    assert timing.as_dict()[CUMULATIVE] >= timing.as_dict()[SETUP]
    assert timing.to_csv().startswith("task,seconds\n")
    assert "Timing (average seconds)" in timing.render()


def test_unknown_destination_beeps_once(demo_config):
    result = run_simulation(dataclasses.replace(demo_config, destination="Atlantis"))
    assert result.transcript == ["BEEP"]
    assert result.exit_code == 1


def test_missing_frame_beeps_for_that_frame_only(tmp_path):
    path = build_demo_fixture(str(tmp_path))
    cfg = load_simulation_config(path)
    os.remove(cfg.frames[1].left)
    transcript = run_simulation(cfg).transcript
    assert transcript[0] == DEMO_TRANSCRIPT[0]
    assert transcript[1] == "BEEP"
    assert transcript[2] == DEMO_TRANSCRIPT[2]


def test_stream_reports_yields_one_batch_per_frame(demo_config):
    items = list(stream_reports(demo_config))
    assert [type(item) for item in items] == [ReportBatch] * 3
    assert [item.frame_id for item in items] == [0, 1, 2]
    assert [len(item.objects) for item in items] == [1, 2, 0]


def test_config_resolves_relative_paths(demo_dir, demo_config):
    assert demo_config.source_node == "gate"
    assert demo_config.destination == "Library"
    assert demo_config.frames[0].left == os.path.join(str(demo_dir), "frames", "f1_left.pgm")
    assert demo_config.match.d_max == 40


def test_config_missing_key(demo_dir, tmp_path):
    text = (demo_dir / "simulation.env").read_text()
    broken = tmp_path / "simulation.env"
    broken.write_text("\n".join(line for line in text.splitlines() if not line.startswith("DESTINATION=")))
    with pytest.raises(ConfigError) as exc:
        load_simulation_config(str(broken))
    assert "DESTINATION (missing)" in str(exc.value)


def test_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_simulation_config(str(tmp_path / "nope.env"))


def test_config_bad_matching_parameters(demo_dir, tmp_path):
    text = (demo_dir / "simulation.env").read_text().replace("WINDOW=9", "WINDOW=4")
    broken = tmp_path / "simulation.env"
    broken.write_text(text)
    with pytest.raises(ConfigError) as exc:
        load_simulation_config(str(broken))
    assert "matching parameters" in str(exc.value)


def test_stage_timer_averages():
    timer = StageTimer()
    timer.record(SETUP, 0.5)
    timer.record("Loading of Images", 0.2)
    timer.record("Loading of Images", 0.4)
    rows = timer.report().as_dict()
    assert rows["Loading of Images"] == pytest.approx(0.3)
    assert rows[CUMULATIVE] == pytest.approx(0.8)
