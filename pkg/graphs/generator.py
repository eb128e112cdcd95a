"""Deterministic graph families, random planar instances and figure fixtures."""
import logging
import math
import random

from .exceptions import BadParameter
from .planegraph import PlaneGraph

logger = logging.getLogger(__name__)


def from_positions(positions, edges):
    """Embed a straight-line drawing: clockwise angular order around each node.

    ``positions`` maps label -> (x, y); ``edges`` lists (label, label, weight).
    The leftmost node anchors the outer-face hint.
    """
    labels = sorted(positions)
    index = {label: i for i, label in enumerate(labels)}
    edge_list = [(index[a], index[b], w) for a, b, w in edges]
    incident = [[] for _ in labels]
    for eid, (u, v, _) in enumerate(edge_list):
        incident[u].append((eid, v))
        incident[v].append((eid, u))
    rotation = []
    for i, label in enumerate(labels):
        x, y = positions[label]

        def angle(item):
            ox, oy = positions[labels[item[1]]]
            return -math.atan2(oy - y, ox - x)

        rotation.append([eid for eid, _ in sorted(incident[i], key=angle)])
    leftmost = min(range(len(labels)), key=lambda i: (positions[labels[i]], labels[i]))
    outer = [(rotation[leftmost][0], leftmost)] if rotation[leftmost] else []
    return PlaneGraph(labels, edge_list, rotation, outer)


def _on_circle(count, radius=10.0, offset=0):
    return {
        offset + i + 1: (
            radius * math.cos(math.pi / 2 - 2 * math.pi * i / count),
            radius * math.sin(math.pi / 2 - 2 * math.pi * i / count),
        )
        for i in range(count)
    }


def cycle(n, weight=1):
    if n < 3:
        raise BadParameter(f'A cycle needs at least 3 nodes, got {n}.')
    positions = _on_circle(n)
    edges = [(i, i % n + 1, weight) for i in range(1, n + 1)]
    return from_positions(positions, edges)


def grid(rows, cols, weight=1):
    """rows x cols grid; label of (r, c) is r * cols + c + 1."""
    if rows < 1 or cols < 1:
        raise BadParameter(f'Grid dimensions must be positive, got {rows}x{cols}.')
    positions = {r * cols + c + 1: (c, -r) for r in range(rows) for c in range(cols)}
    edges = []
    for r in range(rows):
        for c in range(cols):
            label = r * cols + c + 1
            if c + 1 < cols:
                edges.append((label, label + 1, weight))
            if r + 1 < rows:
                edges.append((label, label + cols, weight))
    return from_positions(positions, edges)


def wheel(n, weight=1):
    """Hub (label 1) joined to a rim cycle of ``n`` nodes."""
    if n < 3:
        raise BadParameter(f'A wheel needs a rim of at least 3 nodes, got {n}.')
    positions = {1: (0.0, 0.0)}
    positions.update(_on_circle(n, offset=1))
    edges = [(1, i, weight) for i in range(2, n + 2)]
    edges += [(i, i + 1 if i < n + 1 else 2, weight) for i in range(2, n + 2)]
    return from_positions(positions, edges)


def random_planar(n, extra_edge_fraction, seed):
    """Random stacked triangulation thinned to a spanning tree plus a fraction of the rest."""
    if n < 1:
        raise BadParameter(f'Node count must be positive, got {n}.')
    if not 0 <= extra_edge_fraction <= 1:
        raise BadParameter(f'extra_edge_fraction must lie in [0, 1], got {extra_edge_fraction}.')
    if seed is None:
        raise BadParameter('random_planar needs a seed.')
    rng = random.Random(seed)
    if n < 3:
        edges = [(0, 1, 1)] if n == 2 else []
        rotation = [[0], [0]] if n == 2 else [[]]
        return PlaneGraph(range(1, n + 1), edges, rotation)
    around = {0: [1, 2], 1: [0, 2], 2: [0, 1]}
    faces = [(0, 1, 2), (0, 2, 1)]
    for x in range(3, n):
        f = rng.randrange(len(faces))
        a, b, c = faces[f]
        for node, after in ((b, a), (c, b), (a, c)):
            order = around[node]
            order.insert(order.index(after) + 1, x)
        around[x] = [a, c, b]
        faces[f] = (a, b, x)
        faces.extend([(b, c, x), (c, a, x)])
    pairs = sorted({(min(u, v), max(u, v)) for u in around for v in around[u]})
    # random spanning tree keeps the graph connected
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    shuffled = pairs[:]
    rng.shuffle(shuffled)
    keep = set()
    for u, v in shuffled:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            keep.add((u, v))
    for pair in pairs:
        if pair not in keep and rng.random() < extra_edge_fraction:
            keep.add(pair)
    kept = [pair for pair in pairs if pair in keep]
    eid_of = {pair: eid for eid, pair in enumerate(kept)}
    rotation = [
        [eid_of[(min(u, v), max(u, v))] for v in around[u] if (min(u, v), max(u, v)) in eid_of]
        for u in range(n)
    ]
    edges = [(u, v, 1) for u, v in kept]
    logger.debug('random planar graph', extra={'n': n, 'm': len(edges), 'seed': seed})
    return PlaneGraph(range(1, n + 1), edges, rotation)


def random_weights(g, wmax, seed, minimum=1):
    if wmax < minimum or minimum < 0:
        raise BadParameter(f'Weight range [{minimum}, {wmax}] is empty or negative.')
    rng = random.Random(seed)
    return g.with_weights([rng.randint(minimum, wmax) for _ in g.edges])


_GRID_3A = {c * 4 + b + 1: (c, b) for c in range(3) for b in range(4)}
_GRID_3A_EDGES = [
    (4, 3, 2), (3, 2, 1), (2, 1, 2),
    (8, 7, 2), (7, 6, 1), (6, 5, 2),
    (12, 11, 2), (11, 10, 1), (10, 9, 2),
    (4, 8, 2), (8, 12, 2), (3, 7, 1), (7, 11, 10),
    (2, 6, 10), (6, 10, 1), (1, 5, 2), (5, 9, 2),
]


def _fixture_1a():
    # a=1, b1=2, b2=3, c=4, d=5, x=6; d is the only internal node
    positions = {
        1: (0.0, 2.0), 2: (2.0, 0.5), 3: (1.2, -1.6),
        4: (-2.0, 0.5), 5: (0.8, 0.8), 6: (-1.2, -1.6),
    }
    edges = [
        (1, 2, 1), (2, 5, 2), (5, 1, 2), (2, 3, 0),
        (3, 4, 1), (4, 1, 2), (3, 6, 1), (6, 4, 2),
    ]
    return from_positions(positions, edges)


def _fixture_1c():
    # a=1, b=2, c=3, d=4, x=5 on a pentagon a, d, b, x, c
    positions = dict(zip((1, 4, 2, 5, 3), _on_circle(5).values()))
    edges = [(1, 2, 1), (2, 3, 1), (3, 1, 2), (4, 1, 2), (4, 2, 2), (5, 2, 1), (5, 3, 2)]
    return from_positions(positions, edges)


def _fixture_2():
    # hub v=1, neighbours u1..u7 = 2..8 clockwise
    positions = {
        1: (1300, -552), 2: (1251, 56), 3: (1796, -168), 4: (1870, -769),
        5: (1575, -1144), 6: (968, -1144), 7: (675, -769), 8: (740, -168),
    }
    spokes = (3, 7, 1, 2, 4, 5, 6)
    edges = [(1, u, w) for u, w in zip(range(2, 9), spokes)]
    edges += [(u, u + 1 if u < 8 else 2, 1) for u in range(2, 9)]
    return from_positions(positions, edges)


def _fixture_5a():
    positions = {
        1: (1304, -715), 2: (2204, 181), 3: (3108, -719), 4: (2211, -1619),
        5: (1901, -417), 6: (2509, -421), 7: (2505, -1020), 8: (1901, -1021), 9: (2206, -709),
    }
    edges = [
        (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 1, 1),
        (1, 5, 1), (1, 8, 1), (2, 5, 1), (2, 6, 1),
        (3, 6, 1), (3, 7, 1), (4, 8, 1), (4, 7, 1),
        (5, 9, 1), (6, 9, 1), (7, 9, 1), (8, 9, 1),
    ]
    return from_positions(positions, edges)


def _fixture_3a():
    return from_positions(_GRID_3A, _GRID_3A_EDGES)


def _fixture_4a():
    return from_positions(_GRID_3A, [(a, b, 1) for a, b, _ in _GRID_3A_EDGES])


def _fixture_7a():
    keep = {2, 3, 4, 7, 8}
    positions = {label: xy for label, xy in _GRID_3A.items() if label in keep}
    edges = [(a, b, w) for a, b, w in _GRID_3A_EDGES if a in keep and b in keep]
    return from_positions(positions, edges)


FIXTURES = {
    '1a': _fixture_1a,
    '1c': _fixture_1c,
    '2': _fixture_2,
    '3a': _fixture_3a,
    '4a': _fixture_4a,
    '5a': _fixture_5a,
    '7a': _fixture_7a,
}


def figure_fixture(fixture_id):
    try:
        return FIXTURES[str(fixture_id)]()
    except KeyError:
        raise BadParameter(
            f'Unknown fixture {fixture_id!r}; choose from {", ".join(sorted(FIXTURES))}.'
        ) from None


def generate(kind, **params):
    """Dispatch on ``kind``: cycle, grid, wheel, random_planar, random_weights, figure_fixture."""
    builders = {
        'cycle': cycle,
        'grid': grid,
        'wheel': wheel,
        'random_planar': random_planar,
        'random_weights': random_weights,
        'figure_fixture': figure_fixture,
    }
    if kind not in builders:
        raise BadParameter(f'Unknown generator kind {kind!r}.')
    try:
        return builders[kind](**params)
    except TypeError as exc:
        raise BadParameter(f'Bad parameters for {kind}: {exc}') from None
