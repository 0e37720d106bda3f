from src.media_io.pgm import decode_pgm, encode_pgm, read_pgm, write_pgm
from src.media_io.dispmap import decode_dispmap, encode_dispmap, read_dispmap, write_dispmap
from src.media_io.corners import format_corner_csv, parse_corner_csv, read_corner_csv
from src.media_io.annotations import (
    default_label_map,
    format_annotation_csv,
    load_label_map,
    parse_annotation_csv,
    read_annotation_csv,
    read_label_map,
)
