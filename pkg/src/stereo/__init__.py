from src.stereo.depth import depth_from_disparity, depth_map, object_distance
from src.stereo.disparity import compute_disparity
