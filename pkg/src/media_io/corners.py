"""
Checkerboard corner observation files.

Format:
    board,<cols>,<rows>,<square_size_m>
    view,<view_id>,<L|R>,<corner_index>,<u_px>,<v_px>
    ...
Blank lines and lines starting with '#' are ignored.
"""

import math
from typing import Dict, List, Tuple

import numpy as np

from src.errors import IncompleteView, MissingBoardHeader, NonFiniteCoordinate, ParseError
from src.models import BoardModel, CornerObservationSet, ViewObservation

CAMERAS = ("L", "R")


def _content_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, [field.strip() for field in line.split(",")]


def _parse_board(number: int, fields: List[str]) -> BoardModel:
    if len(fields) != 4 or fields[0] != "board":
        raise MissingBoardHeader("first line must be 'board,<cols>,<rows>,<square_size_m>'", number)
    try:
        return BoardModel(int(fields[1]), int(fields[2]), float(fields[3]))
    except ValueError as e:
        raise MissingBoardHeader(f"invalid board header: {e}", number)


def parse_corner_csv(text: str) -> CornerObservationSet:
    lines = _content_lines(text)
    first = next(lines, None)
    if first is None:
        raise MissingBoardHeader("file is empty", 1)
    board = _parse_board(*first)

    # (view_id, camera) -> {corner_index: (u, v)}, plus the last line seen for error reporting
    grouped: Dict[Tuple[str, str], Dict[int, Tuple[float, float]]] = {}
    last_line: Dict[Tuple[str, str], int] = {}

    for number, fields in lines:
        if fields[0] != "view" or len(fields) != 6:
            raise ParseError("expected 'view,<view_id>,<L|R>,<corner_index>,<u_px>,<v_px>'", number)
        _, view_id, camera, index_text, u_text, v_text = fields
        if camera not in CAMERAS:
            raise ParseError(f"camera must be L or R, got {camera!r}", number)
        try:
            index = int(index_text)
            u, v = float(u_text), float(v_text)
        except ValueError as e:
            raise ParseError(f"malformed corner row: {e}", number)
        if not (math.isfinite(u) and math.isfinite(v)):
            raise NonFiniteCoordinate(f"corner {index} of view {view_id}/{camera} is not finite", number)
        if not 0 <= index < board.corner_count:
            raise ParseError(f"corner index {index} outside 0..{board.corner_count - 1}", number)
        key = (view_id, camera)
        corners = grouped.setdefault(key, {})
        if index in corners:
            raise ParseError(f"corner {index} of view {view_id}/{camera} repeated", number)
        corners[index] = (u, v)
        last_line[key] = number

    views = []
    for key, corners in grouped.items():
        if len(corners) != board.corner_count:
            raise IncompleteView(
                f"view {key[0]}/{key[1]} has {len(corners)} of {board.corner_count} corners", last_line[key]
            )
        points = np.array([corners[i] for i in range(board.corner_count)])
        views.append(ViewObservation(key[0], key[1], points))
    return CornerObservationSet(board, views)


def format_corner_csv(obs: CornerObservationSet) -> str:
    board = obs.board
    lines = [f"board,{board.cols},{board.rows},{board.square_size!r}"]
    for view in obs.views:
        for index, (u, v) in enumerate(view.corners):
            lines.append(f"view,{view.view_id},{view.camera},{index},{float(u)!r},{float(v)!r}")
    return "\n".join(lines) + "\n"


def read_corner_csv(path) -> CornerObservationSet:
    with open(path, "r", encoding="utf-8") as f:
        return parse_corner_csv(f.read())
