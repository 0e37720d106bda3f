import heapq
import logging
from typing import Dict, List, Tuple

from src.errors import AmbiguousDestination, DestinationNotFound, NoRoute
from src.route.graph import RouteGraph

logger = logging.getLogger(__name__)


def geocode(graph: RouteGraph, destination_name: str) -> str:
    """Node id whose name matches `destination_name` case-insensitively."""
    wanted = destination_name.strip().casefold()
    matches = [n.node_id for n in graph.nodes.values() if n.name is not None and n.name.casefold() == wanted]
    if not matches:
        raise DestinationNotFound(f"no place named {destination_name!r}")
    if len(matches) > 1:
        raise AmbiguousDestination(f"{destination_name!r} names {len(matches)} places: {', '.join(matches)}")
    return matches[0]


def path_length(graph: RouteGraph, path: List[str]) -> float:
    total = 0.0
    for a, b in zip(path, path[1:]):
        total += graph.edge_between(a, b).length_m
    return total


def shortest_path(graph: RouteGraph, src: str, dst: str) -> Tuple[List[str], float]:
    """
    Dijkstra over haversine edge lengths.

    Equal-cost frontier entries pop in node-id order, and a node's predecessor
    only changes on a strict improvement, so the result is deterministic.
    """
    for node_id in (src, dst):
        if node_id not in graph.nodes:
            raise KeyError(f"unknown node {node_id!r}")

    dist: Dict[str, float] = {src: 0.0}
    previous: Dict[str, str] = {}
    done = set()
    frontier = [(0.0, src)]
    while frontier:
        d, node = heapq.heappop(frontier)
        if node in done:
            continue
        done.add(node)
        if node == dst:
            break
        for neighbor, edge in graph.neighbors(node):
            if neighbor in done:
                continue
            candidate = d + edge.length_m
            if neighbor not in dist or candidate < dist[neighbor]:
                dist[neighbor] = candidate
                previous[neighbor] = node
                heapq.heappush(frontier, (candidate, neighbor))

    if dst not in done:
        raise NoRoute(f"no route from {src!r} to {dst!r}")

    path = [dst]
    while path[-1] != src:
        path.append(previous[path[-1]])
    path.reverse()
    length = path_length(graph, path)
    logger.debug("Route %s -> %s: %d nodes, %.1f m", src, dst, len(path), length)
    return path, length
