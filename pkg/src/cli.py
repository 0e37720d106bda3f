"""
Command-line surface: one subcommand per pipeline stage, the perception-unit
server, the companion client buttons and the end-to-end simulation.

Results and transcripts go to standard output; log messages go to stderr.
"""

import argparse
import dataclasses
import logging
import sys
from typing import List, Optional, Tuple

from src import config
from src.calib.refine import calibrate_camera
from src.calib.report import format_calibration_report, format_stereo_report, read_stereo_report
from src.calib.stereo_calib import calibrate_stereo
from src.calib.synthetic import generate_synthetic_observations, make_view_poses
from src.detect.detector import detect
from src.errors import ConfigError, GuideSystemError, NoValidDepth, RouteError
from src.guide.compose import compose_guidance
from src.guide.session import (
    BEEP_LINE,
    DEFAULT_SESSION_PATH,
    SpeakInput,
    ask_destination,
    load_destination,
    looks_like_place,
    match_place,
    place_names,
    plan_route,
    save_destination,
)
from src.media_io.annotations import DEFAULT_LABEL_MAP_PATH, read_annotation_csv, read_label_map
from src.media_io.corners import format_corner_csv, read_corner_csv
from src.media_io.dispmap import read_dispmap, write_dispmap
from src.media_io.pgm import read_pgm
from src.models import BBox, BoardModel, CameraIntrinsics, MatchParams, ObjectReport, RouteStep, StereoRig
from src.route.graph import read_route_graph
from src.route.instructions import generate_instructions
from src.route.planner import geocode, shortest_path
from src.sim.fixture import build_demo_fixture
from src.sim.sim_config import load_simulation_config
from src.sim.simulation import run_simulation, stream_reports
from src.stereo.depth import depth_map, object_distance
from src.stereo.disparity import compute_disparity
from src.wire.client import CompanionClient
from src.wire.codec import FrameKind, WireFrame, batch_to_reports, decode_batch
from src.wire.endpoint import parse_endpoint
from src.wire.server import ReportServer

logger = logging.getLogger(__name__)


def _write_or_print(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"✓ Wrote {path}")
    else:
        sys.stdout.write(text)


def _box(text: str) -> BBox:
    try:
        x, y, w, h = (int(v) for v in text.split(","))
        return BBox(x, y, w, h)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected x,y,w,h with w,h > 0, got {text!r} ({e})")


def _object(text: str) -> ObjectReport:
    label, sep, meters = text.rpartition(":")
    if not sep or not label:
        raise argparse.ArgumentTypeError(f"expected label:meters, got {text!r}")
    try:
        distance = None if meters == "unknown" else float(meters)
        return ObjectReport(label, distance, BBox(0, 0, 1, 1))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad distance in {text!r}: {e}")


def _image_size(args) -> Tuple[int, int]:
    return args.width, args.height


# --- calibration -------------------------------------------------------------

def cmd_calibrate(args) -> int:
    obs = read_corner_csv(args.corners)
    report = calibrate_camera(obs, camera=args.camera, image_size=_image_size(args), pixel_size=args.pixel_size)
    _write_or_print(format_calibration_report(report), args.out)
    print(f"✓ rms={report.rms_px:.6f} px focal={report.intrinsics.focal_mm:.4f} mm", file=sys.stderr)
    return 0


def cmd_stereo_calibrate(args) -> int:
    obs = read_corner_csv(args.corners)
    size = _image_size(args)
    left = calibrate_camera(obs, camera="L", image_size=size, pixel_size=args.pixel_size)
    right = calibrate_camera(obs, camera="R", image_size=size, pixel_size=args.pixel_size)
    calibration = calibrate_stereo(obs.for_camera("L"), obs.for_camera("R"), left.intrinsics, right.intrinsics)
    _write_or_print(format_stereo_report(calibration, left.coverage), args.out)
    print(f"✓ stereo rms={calibration.rms_px:.6f} px baseline={calibration.rig.baseline:.4f} m", file=sys.stderr)
    return 0


def cmd_synth_corners(args) -> int:
    board = BoardModel(args.cols, args.rows, args.square_size)
    truth = CameraIntrinsics.from_physical(args.focal_mm, args.pixel_size, args.width / 2, args.height / 2)
    rig = StereoRig(truth, truth, [0.0, 0.0, 0.0], [-args.baseline, 0.0, 0.0]) if args.baseline > 0 else None
    poses = make_view_poses(args.views, board, seed=args.seed)
    obs = generate_synthetic_observations(truth, poses, board, args.noise, args.seed, rig_truth=rig)
    _write_or_print(format_corner_csv(obs), args.out)
    return 0


# --- stereo and detection ----------------------------------------------------

def cmd_disparity(args) -> int:
    params = MatchParams(args.window, args.d_min, args.d_max, args.uniqueness)
    disp = compute_disparity(read_pgm(args.left), read_pgm(args.right), params, workers=args.workers)
    write_dispmap(args.out, disp)
    print(f"✓ Wrote {args.out} ({disp.width}x{disp.height}, {disp.valid.mean():.1%} valid)")
    return 0


def cmd_depth(args) -> int:
    rig, _ = read_stereo_report(args.calibration)
    depth = depth_map(read_dispmap(args.disparity), rig, camera=args.camera)
    for box in args.box:
        try:
            distance = f"{object_distance(depth, box):.3f}"
        except NoValidDepth as e:
            logger.warning("⚠ %s", e)
            distance = "unknown"
        print(f"{box.x},{box.y},{box.w},{box.h},{distance}")
    return 0


def cmd_detect(args) -> int:
    label_map = read_label_map(args.label_map)
    annotations = read_annotation_csv(args.annotations, label_map)
    for det in detect(args.frame, annotations, args.min_confidence):
        print(f"{det.label},{det.box.x},{det.box.y},{det.box.w},{det.box.h},{det.confidence:g}")
    return 0


# --- route and guidance ------------------------------------------------------

def cmd_route(args) -> int:
    graph = read_route_graph(args.graph)
    try:
        path, _ = shortest_path(graph, args.source, geocode(graph, args.to))
    except RouteError as e:
        logger.warning("⚠ %s", e)
        print(BEEP_LINE)
        return 1
    except KeyError:
        raise ConfigError(f"start node {args.source!r} is not in the route graph")
    for step in generate_instructions(graph, path, merge_continues=args.merge_continues):
        print(step.text)
    return 0


def cmd_guide(args) -> int:
    step = RouteStep(args.step, 0.0, 0.0)
    print(compose_guidance(step, args.object or [], args.rate).render())
    return 0


# --- link --------------------------------------------------------------------

def cmd_serve(args) -> int:
    cfg = load_simulation_config(args.config)
    server = ReportServer(parse_endpoint(args.endpoint), args.heartbeat, install_signal_handlers=True)
    server.run(stream_reports(cfg))
    return 0


def _describe(frame: WireFrame, label_map) -> str:
    if frame.kind == FrameKind.REPORT_BATCH:
        batch = decode_batch(frame.payload)
        objects = [f"{r.label}@{'unknown' if r.distance is None else format(r.distance, '.3f')}"
                   for r in batch_to_reports(batch, label_map)]
        return f"BATCH {batch.frame_id}: " + (" ".join(objects) if objects else "(no objects)")
    if frame.kind == FrameKind.BEEP:
        return BEEP_LINE
    return "HEARTBEAT"


def cmd_client_receive(args) -> int:
    label_map = read_label_map(args.label_map)
    with CompanionClient(parse_endpoint(args.endpoint), args.link_timeout) as client:
        client.listen(lambda frame: print(_describe(frame, label_map), flush=True))
    return 1 if client.beeped else 0


def cmd_client_give_input(args) -> int:
    known_places = place_names(read_route_graph(args.graph)) if args.graph else None
    if args.destination is not None:
        destination = args.destination.strip()
        if not looks_like_place(destination):
            raise ConfigError(f"{args.destination!r} does not look like a place name")
        if known_places:
            place = match_place(destination, known_places)
            if place is None:
                raise ConfigError(f"no place called {destination!r} in {args.graph}")
            destination = place
    else:
        destination = ask_destination(known_places)
    save_destination(destination, args.session)
    print(f"✓ Destination set: {destination}")
    return 0


def _session_route(args) -> Optional[List[RouteStep]]:
    graph = read_route_graph(args.graph)
    destination = load_destination(args.session)
    try:
        return plan_route(graph, args.source, destination)
    except RouteError as e:
        logger.warning("⚠ Destination %r rejected: %s", destination, e)
        print(BEEP_LINE)
        return None


def cmd_client_navigate(args) -> int:
    steps = _session_route(args)
    if steps is None:
        return 1
    for step in steps:
        print(step.text)
    return 0


def cmd_client_speak_input(args) -> int:
    steps = _session_route(args)
    if steps is None:
        return 1
    speaker = SpeakInput(steps, read_label_map(args.label_map), args.rate,
                         emit=lambda line: print(line, flush=True))
    with CompanionClient(parse_endpoint(args.endpoint), args.link_timeout) as client:
        client.listen(speaker)
    return 1 if client.beeped else 0


# --- simulation --------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = load_simulation_config(args.config)
    if args.destination is not None:
        cfg = dataclasses.replace(cfg, destination=args.destination)
    result = run_simulation(cfg)
    for line in result.transcript:
        print(line)
    print(result.timing.render())
    if args.timing_csv:
        with open(args.timing_csv, "w", encoding="utf-8") as f:
            f.write(result.timing.to_csv())
    return result.exit_code


def cmd_make_fixture(args) -> int:
    print(build_demo_fixture(args.directory))
    return 0


def _add_image_size(p):
    p.add_argument("--width", type=int, default=config.IMAGE_WIDTH,
                   help=f"Image width in pixels (default: {config.IMAGE_WIDTH})")
    p.add_argument("--height", type=int, default=config.IMAGE_HEIGHT,
                   help=f"Image height in pixels (default: {config.IMAGE_HEIGHT})")
    p.add_argument("--pixel-size", type=float, default=config.PIXEL_SIZE_MM,
                   help=f"Physical pixel size in mm (default: {config.PIXEL_SIZE_MM})")


def _add_link(p, endpoint_help: str):
    p.add_argument("--endpoint", default=f"{config.HOST}:{config.PORT}",
                   help=f"{endpoint_help} (default: {config.HOST}:{config.PORT})")


def _add_client_session(p):
    p.add_argument("--session", default=DEFAULT_SESSION_PATH,
                   help=f"Session file holding the destination (default: {DEFAULT_SESSION_PATH})")


def parse_arguments(argv: Optional[List[str]] = None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Stereo-vision walking guide - calibration, obstacle distances, routing and spoken guidance",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py make-fixture demo/                   # Write the three-frame demo scenario
  python main.py simulate --config demo/simulation.env
  python main.py simulate --config demo/simulation.env --destination Atlantis   # BEEP
  python main.py serve --config demo/simulation.env --endpoint 127.0.0.1:5321
  python main.py client give-input --destination Library
  python main.py client give-input --graph demo/route.csv
  python main.py client speak-input --graph demo/route.csv --from gate

Environment variables:
  GUIDE_HOST, GUIDE_PORT: Default endpoint
  GUIDE_HEARTBEAT_SECONDS, GUIDE_LINK_TIMEOUT_SECONDS: Link liveness
  GUIDE_MIN_CONFIDENCE, GUIDE_SPEAKING_RATE, GUIDE_LOG_LEVEL
        """
    )
    parser.add_argument("--log-level", default=None, help=f"Logging level (default: {config.LOG_LEVEL})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="Calibrate one camera from corner observations")
    p.add_argument("--corners", required=True, help="Corner CSV")
    p.add_argument("--camera", choices=("L", "R"), default=None, help="Camera to use when the file holds both")
    p.add_argument("--out", help="Report path (default: standard output)")
    _add_image_size(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("stereo-calibrate", help="Calibrate both cameras and their relative pose")
    p.add_argument("--corners", required=True, help="Corner CSV with L and R views")
    p.add_argument("--out", help="Report path (default: standard output)")
    _add_image_size(p)
    p.set_defaults(func=cmd_stereo_calibrate)

    p = sub.add_parser("synth-corners", help="Write synthetic corner observations")
    p.add_argument("--out", help="Corner CSV path (default: standard output)")
    p.add_argument("--views", type=int, default=12)
    p.add_argument("--noise", type=float, default=0.5, help="Corner noise sigma in pixels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--focal-mm", type=float, default=2.0)
    p.add_argument("--baseline", type=float, default=0.0, help="Add a right camera this many meters to the right")
    p.add_argument("--cols", type=int, default=config.BOARD_COLS)
    p.add_argument("--rows", type=int, default=config.BOARD_ROWS)
    p.add_argument("--square-size", type=float, default=config.SQUARE_SIZE_M)
    _add_image_size(p)
    p.set_defaults(func=cmd_synth_corners)

    p = sub.add_parser("disparity", help="Block-match a rectified PGM pair into a DSP1 file")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=9)
    p.add_argument("--d-min", type=int, default=0)
    p.add_argument("--d-max", type=int, default=64)
    p.add_argument("--uniqueness", type=float, default=1.15)
    p.add_argument("--workers", type=int, default=None,
                   help=f"Row-band worker threads (default: {config.DISPARITY_WORKERS})")
    p.set_defaults(func=cmd_disparity)

    p = sub.add_parser("depth", help="Mean distance inside boxes of a disparity map")
    p.add_argument("--disparity", required=True, help="DSP1 file")
    p.add_argument("--calibration", required=True, help="Stereo calibration report")
    p.add_argument("--box", type=_box, action="append", required=True, help="x,y,w,h (repeatable)")
    p.add_argument("--camera", choices=("left", "right"), default="left")
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("detect", help="Detections for one frame")
    p.add_argument("--annotations", required=True)
    p.add_argument("--frame", required=True)
    p.add_argument("--label-map", default=DEFAULT_LABEL_MAP_PATH)
    p.add_argument("--min-confidence", type=float, default=None,
                   help=f"Confidence threshold (default: {config.MIN_CONFIDENCE})")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("route", help="Turn-by-turn steps to a named destination")
    p.add_argument("--graph", required=True)
    p.add_argument("--from", dest="source", required=True, help="Start node id")
    p.add_argument("--to", required=True, help="Destination name")
    p.add_argument("--merge-continues", action="store_true", help="Merge consecutive continue steps")
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("guide", help="Compose one guidance line")
    p.add_argument("--step", required=True, help="Route step text")
    p.add_argument("--object", type=_object, action="append", help="label:meters or label:unknown (repeatable)")
    p.add_argument("--rate", type=float, default=None, help=f"Speaking rate (default: {config.SPEAKING_RATE})")
    p.set_defaults(func=cmd_guide)

    p = sub.add_parser("serve", help="Push report batches for a scenario to one client at a time")
    p.add_argument("--config", required=True, help="Simulation file")
    _add_link(p, "Address to listen on")
    p.add_argument("--heartbeat", type=float, default=None,
                   help=f"Idle heartbeat interval in seconds (default: {config.HEARTBEAT_SECONDS})")
    p.set_defaults(func=cmd_serve)

    client = sub.add_parser("client", help="Companion-device commands")
    client_sub = client.add_subparsers(dest="client_command", required=True)

    p = client_sub.add_parser("receive", help="Print every frame from the server")
    _add_link(p, "Server address")
    p.add_argument("--label-map", default=DEFAULT_LABEL_MAP_PATH)
    p.add_argument("--link-timeout", type=float, default=None,
                   help=f"Beep after this many silent seconds (default: {config.LINK_TIMEOUT_SECONDS})")
    p.set_defaults(func=cmd_client_receive)

    p = client_sub.add_parser("give-input", help="Set the destination")
    p.add_argument("--destination", default=None, help="Destination name (prompted when omitted)")
    p.add_argument("--graph", default=None, help="Route graph whose place names the destination must match")
    _add_client_session(p)
    p.set_defaults(func=cmd_client_give_input)

    p = client_sub.add_parser("navigate", help="Print the route to the stored destination")
    p.add_argument("--graph", required=True)
    p.add_argument("--from", dest="source", required=True, help="Start node id")
    _add_client_session(p)
    p.set_defaults(func=cmd_client_navigate)

    p = client_sub.add_parser("speak-input", help="Speak guidance for each report batch from the server")
    _add_link(p, "Server address")
    p.add_argument("--graph", required=True)
    p.add_argument("--from", dest="source", required=True, help="Start node id")
    p.add_argument("--label-map", default=DEFAULT_LABEL_MAP_PATH)
    p.add_argument("--rate", type=float, default=None, help=f"Speaking rate (default: {config.SPEAKING_RATE})")
    p.add_argument("--link-timeout", type=float, default=None,
                   help=f"Beep after this many silent seconds (default: {config.LINK_TIMEOUT_SECONDS})")
    _add_client_session(p)
    p.set_defaults(func=cmd_client_speak_input)

    p = sub.add_parser("simulate", help="Run the end-to-end walk over a scenario")
    p.add_argument("--config", required=True, help="Simulation file")
    p.add_argument("--destination", default=None, help="Override DESTINATION from the file")
    p.add_argument("--timing-csv", default=None, help="Also write the timing report as task,seconds CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("make-fixture", help="Write the three-frame demo scenario")
    p.add_argument("directory")
    p.set_defaults(func=cmd_make_fixture)

    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_arguments(argv)
    config.configure_logging(args.log_level)
    try:
        config.validate_config()
        return args.func(args)
    except (GuideSystemError, ValueError) as e:
        print(f"✗ {e}", file=sys.stderr)
        return 1
