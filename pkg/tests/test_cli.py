import logging
import socket
import threading

import pytest

from src.cli import main, parse_arguments
from src.sim import DEMO_TRANSCRIPT, build_demo_fixture


@pytest.fixture(autouse=True)
def restore_logging():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture(scope="module")
def demo(tmp_path_factory):
    directory = tmp_path_factory.mktemp("cli_demo")
    build_demo_fixture(str(directory))
    return directory


def test_make_fixture(capsys, tmp_path):
    assert main(["make-fixture", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip() == str(tmp_path / "simulation.env")


def test_simulate_prints_transcript_and_timing(demo, capsys, tmp_path):
    timing_csv = tmp_path / "timing.csv"
    code = main(["simulate", "--config", str(demo / "simulation.env"), "--timing-csv", str(timing_csv)])
    out = capsys.readouterr().out.splitlines()
    assert code == 0
    assert out[:3] == DEMO_TRANSCRIPT
    assert "Timing (average seconds)" in out
    assert timing_csv.read_text().startswith("task,seconds\n")


def test_simulate_unknown_destination(demo, capsys):
    code = main(["simulate", "--config", str(demo / "simulation.env"), "--destination", "Atlantis"])
    assert code == 1
    assert capsys.readouterr().out.splitlines()[0] == "BEEP"


def test_route_command(demo, capsys):
    assert main(["route", "--graph", str(demo / "route.csv"), "--from", "gate", "--to", "library"]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "Head north on Main Way",
        "Turn right onto Library Road",
        "Continue on Library Road",
        "You have arrived at Library",
    ]


def test_route_to_nowhere_beeps(demo, capsys):
    assert main(["route", "--graph", str(demo / "route.csv"), "--from", "gate", "--to", "Atlantis"]) == 1
    assert capsys.readouterr().out.strip() == "BEEP"


def test_guide_command(capsys):
    code = main(["guide", "--step", "Head north on Main Way", "--object", "chair:1.524", "--rate", "0.8"])
    assert code == 0
    assert capsys.readouterr().out.strip() == \
        "SPEAK[rate=0.8]: Head north on Main Way but beware there is chair is at 5 feet"


def test_detect_command(demo, capsys):
    assert main(["detect", "--annotations", str(demo / "annotations.csv"), "--frame", "f2"]) == 0
    labels = [line.split(",")[0] for line in capsys.readouterr().out.splitlines()]
    assert labels == ["person", "chair"]


def test_give_input_then_navigate(demo, capsys, tmp_path):
    session = str(tmp_path / "session.json")
    assert main(["client", "give-input", "--destination", "Library", "--session", session]) == 0
    assert main(["client", "navigate", "--graph", str(demo / "route.csv"), "--from", "gate",
                 "--session", session]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "✓ Destination set: Library"
    assert out[-1] == "You have arrived at Library"


def test_give_input_prompts(mocker, capsys, tmp_path):
    session = str(tmp_path / "session.json")
    mocker.patch("builtins.input", side_effect=["", "Library"])
    assert main(["client", "give-input", "--session", session]) == 0
    assert "⚠ Please say where you would like to go" in capsys.readouterr().out


def test_give_input_checks_the_map(demo, mocker, capsys, tmp_path):
    session = str(tmp_path / "session.json")
    mocker.patch("builtins.input", side_effect=["Atlantis", "library"])
    assert main(["client", "give-input", "--graph", str(demo / "route.csv"), "--session", session]) == 0
    out = capsys.readouterr().out
    assert "No place called 'Atlantis' on the map" in out
    assert out.splitlines()[-1] == "✓ Destination set: Library"
    assert main(["client", "give-input", "--graph", str(demo / "route.csv"), "--destination", "Atlantis",
                 "--session", session]) == 1


def test_speak_input_exits_nonzero_after_beep(demo, capsys, tmp_path):
    session = str(tmp_path / "session.json")
    assert main(["client", "give-input", "--destination", "Library", "--session", session]) == 0
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    listener.bind(("127.0.0.1", 0))
    listener.listen(1)

    def send_garbage():
        conn, _ = listener.accept()
        with conn:
            conn.sendall(b"HTTP/1.1 200 OK\r\n")
        listener.close()

    threading.Thread(target=send_garbage, daemon=True).start()
    host, port = listener.getsockname()
    code = main(["client", "speak-input", "--endpoint", f"{host}:{port}", "--graph", str(demo / "route.csv"),
                 "--from", "gate", "--link-timeout", "3.5", "--session", session])
    assert code == 1
    assert capsys.readouterr().out.splitlines()[-1] == "BEEP"


def test_navigate_without_destination(demo, capsys, tmp_path):
    code = main(["client", "navigate", "--graph", str(demo / "route.csv"), "--from", "gate",
                 "--session", str(tmp_path / "none.json")])
    assert code == 1
    assert "give-input" in capsys.readouterr().err


def test_synth_then_calibrate(capsys, tmp_path):
    corners = tmp_path / "corners.csv"
    assert main(["synth-corners", "--out", str(corners), "--views", "8", "--noise", "0.0", "--seed", "3"]) == 0
    assert main(["calibrate", "--corners", str(corners)]) == 0
    assert "rms=" in capsys.readouterr().err


def test_bad_box_argument():
    with pytest.raises(SystemExit):
        parse_arguments(["depth", "--disparity", "d.dsp", "--calibration", "c.txt", "--box", "1,2,0,4"])
