from src.route.graph import (
    RouteEdge,
    RouteGraph,
    RouteNode,
    format_route_graph,
    haversine,
    initial_bearing,
    parse_route_graph,
    read_route_graph,
)
from src.route.instructions import compass_sector, generate_instructions
from src.route.planner import geocode, path_length, shortest_path
