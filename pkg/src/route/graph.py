"""
Offline route graph: named geographic nodes joined by undirected, optionally named ways.

File format, one record per line:

    node,<id>,<name|->,<lat>,<lon>
    edge,<a>,<b>,<wayname|->
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from src.errors import BadCoordinate, DanglingEdge, DuplicateNodeId, ParseError

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class RouteNode:
    node_id: str
    name: Optional[str]
    lat: float
    lon: float


@dataclass(frozen=True)
class RouteEdge:
    a: str
    b: str
    way: Optional[str]
    length_m: float


@dataclass
class RouteGraph:
    nodes: Dict[str, RouteNode] = field(default_factory=dict)
    edges: List[RouteEdge] = field(default_factory=list)
    adjacency: Dict[str, List[Tuple[str, RouteEdge]]] = field(default_factory=dict)

    def add_node(self, node: RouteNode):
        if node.node_id in self.nodes:
            raise ValueError(f"duplicate node id {node.node_id!r}")
        self.nodes[node.node_id] = node
        self.adjacency[node.node_id] = []

    def add_edge(self, a: str, b: str, way: Optional[str] = None) -> RouteEdge:
        if a == b:
            raise ValueError(f"self-loop on node {a!r}")
        na, nb = self.nodes[a], self.nodes[b]
        edge = RouteEdge(a, b, way, haversine(na.lat, na.lon, nb.lat, nb.lon))
        self.edges.append(edge)
        self.adjacency[a].append((b, edge))
        self.adjacency[b].append((a, edge))
        return edge

    @property
    def size(self) -> Tuple[int, int]:
        return len(self.nodes), len(self.edges)

    def neighbors(self, node_id: str) -> List[Tuple[str, RouteEdge]]:
        return self.adjacency[node_id]

    def edge_between(self, a: str, b: str) -> RouteEdge:
        """Shortest edge joining a and b (first in file order on ties)."""
        candidates = [e for n, e in self.adjacency[a] if n == b]
        if not candidates:
            raise KeyError((a, b))
        return min(candidates, key=lambda e: e.length_m)

    def display_name(self, node_id: str) -> str:
        return self.nodes[node_id].name or node_id


def haversine(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(a)))


def initial_bearing(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Compass bearing in degrees [0, 360) from the first point toward the second."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dlmb = math.radians(lon2 - lon1)
    y = math.sin(dlmb) * math.cos(phi2)
    x = math.cos(phi1) * math.sin(phi2) - math.sin(phi1) * math.cos(phi2) * math.cos(dlmb)
    return (math.degrees(math.atan2(y, x)) + 360.0) % 360.0


def _optional(text: str) -> Optional[str]:
    text = text.strip()
    return None if text in ("", "-") else text


def _coordinate(text: str, limit: float, what: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise BadCoordinate(f"{what} {text!r} is not a number", lineno)
    if not math.isfinite(value) or not -limit <= value <= limit:
        raise BadCoordinate(f"{what} {value} outside [-{limit:g}, {limit:g}]", lineno)
    return value


def parse_route_graph(text: str) -> RouteGraph:
    graph = RouteGraph()
    pending_edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if fields[0] == "node" and len(fields) == 5:
            node_id = fields[1]
            if not node_id:
                raise ParseError("empty node id", lineno)
            if node_id in graph.nodes:
                raise DuplicateNodeId(f"node id {node_id!r} defined twice", lineno)
            lat = _coordinate(fields[3], 90.0, "latitude", lineno)
            lon = _coordinate(fields[4], 180.0, "longitude", lineno)
            graph.add_node(RouteNode(node_id, _optional(fields[2]), lat, lon))
        elif fields[0] == "edge" and len(fields) == 4:
            pending_edges.append((lineno, fields[1], fields[2], _optional(fields[3])))
        else:
            raise ParseError(f"unrecognized route line {line!r}", lineno)

    for lineno, a, b, way in pending_edges:
        for end in (a, b):
            if end not in graph.nodes:
                raise DanglingEdge(f"edge references unknown node {end!r}", lineno)
        if a == b:
            raise ParseError(f"self-loop on node {a!r}", lineno)
        graph.add_edge(a, b, way)
    return graph


def read_route_graph(path) -> RouteGraph:
    with open(path, "r", encoding="utf-8") as f:
        return parse_route_graph(f.read())


def format_route_graph(graph: RouteGraph) -> str:
    lines = [f"node,{n.node_id},{n.name or '-'},{n.lat!r},{n.lon!r}" for n in graph.nodes.values()]
    lines += [f"edge,{e.a},{e.b},{e.way or '-'}" for e in graph.edges]
    return "\n".join(lines) + "\n"
