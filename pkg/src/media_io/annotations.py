"""
Detection annotation and label-map files.

    annotations: frame_id,label,x,y,w,h,confidence
    label map:   id,label
An optional header row ("frame_id,..." / "id,label") is skipped.
"""

import math
import os
from typing import List

from src.errors import BadBBox, BadConfidence, DuplicateLabel, ParseError, UnknownLabel
from src.models import AnnotationSet, BBox, Detection, LabelMap

DEFAULT_LABEL_MAP_PATH = os.path.join(os.path.dirname(__file__), "data", "label_map.csv")


def _rows(text: str, header_first_field: str):
    first = True
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [field.strip() for field in line.split(",")]
        # The header, when present, is the first non-comment line
        is_header = first and fields[0] == header_first_field
        first = False
        if is_header:
            continue
        yield number, fields


def load_label_map(text: str) -> LabelMap:
    pairs = []
    seen_ids, seen_labels = set(), set()
    for number, fields in _rows(text, "id"):
        if len(fields) != 2:
            raise ParseError("expected 'id,label'", number)
        try:
            label_id = int(fields[0])
        except ValueError:
            raise ParseError(f"label id is not an integer: {fields[0]!r}", number)
        label = fields[1]
        if not label:
            raise ParseError("label is empty", number)
        if label_id in seen_ids or label in seen_labels:
            raise DuplicateLabel(f"label id {label_id} / label {label!r} already defined", number)
        seen_ids.add(label_id)
        seen_labels.add(label)
        pairs.append((label_id, label))
    return LabelMap(pairs)


def default_label_map() -> LabelMap:
    """The shipped 90-class everyday-object vocabulary."""
    with open(DEFAULT_LABEL_MAP_PATH, "r", encoding="utf-8") as f:
        return load_label_map(f.read())


def parse_annotation_csv(text: str, label_map: LabelMap) -> AnnotationSet:
    entries = {}
    for number, fields in _rows(text, "frame_id"):
        if len(fields) != 7:
            raise ParseError("expected 'frame_id,label,x,y,w,h,confidence'", number)
        frame_id, label = fields[0], fields[1]
        if label not in label_map:
            raise UnknownLabel(f"label {label!r} is not in the label map", number)
        try:
            x, y, w, h = (int(v) for v in fields[2:6])
        except ValueError:
            raise ParseError(f"bounding box must be integers: {fields[2:6]}", number)
        if w < 1 or h < 1:
            raise BadBBox(f"bounding box needs w,h >= 1, got {w}x{h}", number)
        try:
            confidence = float(fields[6])
        except ValueError:
            raise BadConfidence(f"confidence is not a number: {fields[6]!r}", number)
        if not (math.isfinite(confidence) and 0.0 <= confidence <= 1.0):
            raise BadConfidence(f"confidence {confidence} outside [0, 1]", number)
        entries.setdefault(frame_id, []).append(Detection(label, BBox(x, y, w, h), confidence))
    return AnnotationSet(entries)


def format_annotation_csv(annotations: AnnotationSet) -> str:
    lines: List[str] = ["frame_id,label,x,y,w,h,confidence"]
    for frame_id, detections in annotations.entries.items():
        for d in detections:
            lines.append(f"{frame_id},{d.label},{d.box.x},{d.box.y},{d.box.w},{d.box.h},{d.confidence!r}")
    return "\n".join(lines) + "\n"


def read_label_map(path) -> LabelMap:
    with open(path, "r", encoding="utf-8") as f:
        return load_label_map(f.read())


def read_annotation_csv(path, label_map: LabelMap) -> AnnotationSet:
    with open(path, "r", encoding="utf-8") as f:
        return parse_annotation_csv(f.read(), label_map)
