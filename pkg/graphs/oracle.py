"""Exact reference answers used as ground truth by the tests and ``--oracle``."""
import logging
from collections import deque
from typing import NamedTuple

import networkx as nx

from .distance import INFINITY, dist_add
from .exceptions import UnknownEdge, WeightedInput

logger = logging.getLogger(__name__)


class CycleCheck(NamedTuple):
    simple: bool
    closed: bool
    weight: object


def _edge_order(graph):
    return sorted(graph.edges(data=True), key=lambda item: item[2]['eid'])


def _shortest_detour(graph, u, v, data, cutoff=None):
    """Shortest v->u path avoiding edge (u, v): (length, path) or None."""
    graph.remove_edge(u, v)
    try:
        return nx.single_source_dijkstra(graph, v, target=u, cutoff=cutoff, weight='weight')
    except nx.NetworkXNoPath:
        return None
    finally:
        graph.add_edge(u, v, **data)


def shortest_cycle(g, limit=INFINITY):
    """Min-weight simple cycle as ``(weight, [labels])``.

    ``(INFINITY, None)`` when the graph has no cycle lighter than ``limit``.
    """
    graph = g.to_networkx()
    best, best_cycle = limit, None
    for u, v, data in _edge_order(graph):
        w = data['weight']
        if best is not INFINITY and w >= best:
            continue
        cutoff = None if best is INFINITY else best - w
        found = _shortest_detour(graph, u, v, data, cutoff)
        if found is None:
            continue
        length, path = found
        if w + length < best:
            best, best_cycle = w + length, path
    if best_cycle is None:
        return INFINITY, None
    return best, best_cycle


def brute_girth(g, limit=INFINITY):
    """girth = min over edges (x, y) of w(x, y) + dist without that edge, if below ``limit``."""
    return shortest_cycle(g, limit)[0]


def shortest_cycle_through(g, label, limit=INFINITY):
    """Min-weight simple cycle containing ``label``, as ``(weight, [labels])``."""
    graph = g.to_networkx()
    best, best_cycle = INFINITY, None
    for x in sorted(graph.neighbors(label)):
        data = dict(graph.edges[label, x])
        w = data['weight']
        found = _shortest_detour(graph, label, x, data)
        if found is None:
            continue
        length, path = found
        if w + length < best:
            best, best_cycle = w + length, path
        if best <= limit:
            break
    return best, best_cycle


def brute_girth_bfs(g):
    """Unweighted girth by breadth-first search from every node."""
    if not g.is_unit_weighted:
        raise WeightedInput('The BFS oracle accepts unit weights only.')
    adjacency = [[y for y, _ in row] for row in g.adjacency]
    best = INFINITY
    for source in range(g.n):
        dist = {source: 0}
        parent = {source: None}
        queue = deque([source])
        while queue:
            x = queue.popleft()
            if best is not INFINITY and 2 * dist[x] + 1 >= best:
                break
            for y in adjacency[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
                elif parent[x] != y:
                    best = min(best, dist[x] + dist[y] + 1)
    return best


def dist_without_edge(g, u, v, e):
    """Distance between labels ``u`` and ``v`` once edge ``e`` (a label pair) is removed."""
    graph = g.to_networkx()
    a, b = e
    if not graph.has_edge(a, b):
        raise UnknownEdge(f'Edge {e} is not in the graph.')
    graph.remove_edge(a, b)
    try:
        return nx.dijkstra_path_length(graph, u, v, weight='weight')
    except nx.NetworkXNoPath:
        return INFINITY


def verify_cycle(g, cycle):
    """Check that ``cycle`` (labels, first node not repeated) is a closed simple cycle of ``g``."""
    if not cycle:
        return CycleCheck(False, False, INFINITY)
    weight = 0
    closed = True
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        step = g.label_weight(a, b) if a != b else INFINITY
        if step is INFINITY:
            closed = False
        weight = dist_add(weight, step)
    simple = closed and len(cycle) >= 3 and len(set(cycle)) == len(cycle)
    return CycleCheck(simple, closed, weight)
