"""Graph transforms that bring an input block into the normalized form.

The pipeline is contract, then bounded-weight rounding, then outerplane
slicing, then degree reduction.  Every transform keeps node labels opaque and
reports how new labels map back through a :class:`NodeMap`.
"""
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from graphs.distance import INFINITY
from graphs.exceptions import (
    BadParameter,
    DegreeTooSmall,
    InvariantViolation,
    NotBiconnected,
    NotMinDepthNeighbor,
    NotNeighbor,
    PreconditionViolated,
    ZeroCycleCollapse,
)
from graphs.oracle import brute_girth
from graphs.planegraph import Builder, PlaneGraph, embed, fresh_label, outerplane_depths, restrict

logger = logging.getLogger(__name__)

SLICE_FACTOR = 36


class NodeMap:
    """Transformed label -> original label, or None for synthetic nodes.

    Labels missing from ``mapping`` map to themselves.  ``merged`` lists the
    original labels folded into one node by zero-weight contraction, and
    ``chains`` the labels suppressed inside a contracted edge ``(a, b)``
    (``a < b``), listed from ``a`` to ``b``.
    """

    def __init__(self, mapping=None, merged=None, chains=None):
        self.mapping = dict(mapping or {})
        self.merged = dict(merged or {})
        self.chains = dict(chains or {})

    def original(self, label):
        return self.mapping.get(label, label)

    def members(self, label):
        """Original labels represented by ``label``."""
        origin = self.original(label)
        if origin is None:
            return ()
        return self.merged.get(origin, (origin,))

    def chain(self, a, b):
        if a == b:
            return ()
        if a < b:
            return self.chains.get((a, b), ())
        return tuple(reversed(self.chains.get((b, a), ())))

    def expand_walk(self, walk):
        """Closed walk in original labels: synthetic nodes drop out, chains come back."""
        mapped = []

        def push(label):
            if label is not None and (not mapped or mapped[-1] != label):
                mapped.append(label)

        origins = [self.original(label) for label in walk]
        for a, b in zip(origins, origins[1:] + origins[:1]):
            push(a)
            if a is not None and b is not None:
                for label in self.chain(a, b):
                    push(label)
        while len(mapped) > 1 and mapped[0] == mapped[-1]:
            mapped.pop()
        return mapped

    def then(self, earlier):
        """Compose: ``self`` applied first, ``earlier`` maps its results to originals."""
        mapping = dict(earlier.mapping)
        for label, middle in self.mapping.items():
            mapping[label] = None if middle is None else earlier.original(middle)
        merged = dict(earlier.merged)
        merged.update(self.merged)
        chains = dict(earlier.chains)
        chains.update(self.chains)
        return NodeMap(mapping, merged, chains)


def density(g):
    """(w(g) - |E(g)| + |V(g)|) / |V(g)| as an exact fraction."""
    if g.n == 0:
        return Fraction(1)
    return Fraction(g.total_weight - g.m + g.n, g.n)


def round_weights(g, w):
    if w < 1:
        raise BadParameter(f'Rounding threshold must be at least 1, got {w}.')
    return g.with_weights([min(e.weight, w) for e in g.edges])


def _merge_rotations(rot_a, rot_b, eid):
    i = rot_a.index(eid)
    j = rot_b.index(eid)
    return rot_a[:i] + rot_b[j + 1:] + rot_b[:j] + rot_a[i + 1:]


def expand_with_map(g):
    """Expansion plus its NodeMap and the weight of the lightest collapsed cycle.

    Zero-weight edges are contracted, positive edges subdivided into unit
    paths.  Loops and parallel pairs produced by the contraction are dropped
    and reported through the candidate (INFINITY when nothing collapsed).
    """
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    embedded = g.is_embedded
    rot = {i: list(r) for i, r in enumerate(g.rotation)} if embedded else None
    candidate = INFINITY
    for eid, (u, v, w) in enumerate(g.edges):
        if w != 0:
            continue
        ru, rv = find(u), find(v)
        if ru == rv:
            candidate = 0
            if embedded:
                rot[ru] = [x for x in rot[ru] if x != eid]
            continue
        parent[rv] = ru
        if embedded:
            rot[ru] = _merge_rotations(rot[ru], rot[rv], eid)
            del rot[rv]

    classes = {}
    for i in range(g.n):
        classes.setdefault(find(i), []).append(i)
    builder = Builder()
    node_of_root = {}
    merged = {}
    for root in sorted(classes, key=lambda r: min(g.labels[i] for i in classes[r])):
        members = sorted(g.labels[i] for i in classes[root])
        node_of_root[root] = builder.add_node(members[0])
        if len(members) > 1:
            merged[members[0]] = tuple(members)

    kept = {}
    seen_pairs = set()
    for eid, (u, v, w) in enumerate(g.edges):
        if w == 0:
            continue
        ru, rv = find(u), find(v)
        if ru == rv and w <= 2:
            candidate = min(candidate, w)
            continue
        if w == 1:
            pair = (min(ru, rv), max(ru, rv))
            if pair in seen_pairs:
                candidate = min(candidate, 2)
                continue
            seen_pairs.add(pair)
        kept[eid] = (ru, rv, w)

    mapping = {}
    next_label = fresh_label(g.labels)
    ends = {}
    for eid, (ru, rv, w) in kept.items():
        previous = node_of_root[ru]
        chain = []
        for _ in range(w - 1):
            node = builder.add_node(next_label)
            mapping[next_label] = None
            next_label += 1
            chain.append(builder.add_edge(previous, node, 1))
            if len(chain) > 1:
                builder.rotation[previous].extend([chain[-2], chain[-1]])
            previous = node
        chain.append(builder.add_edge(previous, node_of_root[rv], 1))
        if len(chain) > 1:
            builder.rotation[previous].extend([chain[-2], chain[-1]])
        ends[eid] = (chain[0], chain[-1])

    if embedded:
        for root, order in rot.items():
            node = node_of_root[root]
            used = set()
            for eid in order:
                if eid not in kept:
                    continue
                first, last = ends[eid]
                ru, rv, _ = kept[eid]
                if ru != rv:
                    builder.rotation[node].append(first if ru == root else last)
                else:
                    # both ends of a subdivided loop sit here
                    builder.rotation[node].append(last if eid in used else first)
                    used.add(eid)
        for eid, tail in g.outer:
            if eid in kept:
                first, last = ends[eid]
                root = find(tail)
                if kept[eid][0] == root:
                    builder.outer.append((first, node_of_root[root]))
                else:
                    builder.outer.append((last, node_of_root[root]))
    result = builder.build(embedded=embedded)
    logger.debug('expanded', extra={'n': g.n, 'expanded_n': result.n, 'candidate': candidate})
    return result, NodeMap(mapping, merged), candidate


def expand(g):
    """Unit-weight expansion; raises ZeroCycleCollapse when a cycle folded away."""
    result, node_map, candidate = expand_with_map(g)
    if candidate is not INFINITY:
        raise ZeroCycleCollapse(candidate, result, node_map)
    return result


def is_contracted(g):
    for i in range(g.n):
        if g.degree(i) == 2:
            (a, _), (b, _) = g.adjacency[i]
            if g.edge_id(a, b) is None:
                return False
    return True


def is_biconnected(g):
    if g.n < 3:
        return False
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from((u, v) for u, v, _ in g.edges)
    return nx.is_biconnected(graph)


def _redirect(dart, v, a, b):
    """Move a hint dart off the suppressed node ``v`` onto the new edge (a, b)."""
    t, h = dart
    if v not in dart:
        return dart
    if (t, h) in ((a, v), (v, b)):
        return (a, b)
    return (b, a)


def contract_with_map(g0):
    """Contraction plus a NodeMap whose ``chains`` hold the suppressed paths."""
    if not is_biconnected(g0):
        raise NotBiconnected('contract needs a biconnected graph with at least 3 nodes.')
    if not g0.is_embedded:
        g0 = embed(g0)
    weights = {}
    interior = {}
    around = []
    for i in range(g0.n):
        around.append([g0.other(eid, i) for eid in g0.rotation[i]])
    for u, v, w in g0.edges:
        weights[(min(u, v), max(u, v))] = w
    adjacent = [set(nbrs) for nbrs in around]
    hints = [(tail, g0.other(eid, tail)) for eid, tail in g0.outer]
    alive = [True] * g0.n

    def inner(x, y):
        # suppressed indices on the edge x-y, read from x
        path = interior.pop((min(x, y), max(x, y)), [])
        return path if x < y else path[::-1]

    queue = deque(i for i in range(g0.n) if len(adjacent[i]) == 2)
    removed = 0
    while queue:
        v = queue.popleft()
        if not alive[v] or len(adjacent[v]) != 2:
            continue
        a, b = sorted(adjacent[v])
        if b in adjacent[a]:
            continue
        w = weights.pop((min(a, v), max(a, v))) + weights.pop((min(b, v), max(b, v)))
        weights[(a, b)] = w
        interior[(a, b)] = inner(a, v) + [v] + inner(v, b)
        alive[v] = False
        removed += 1
        adjacent[a].discard(v)
        adjacent[b].discard(v)
        adjacent[a].add(b)
        adjacent[b].add(a)
        around[a][around[a].index(v)] = b
        around[b][around[b].index(v)] = a
        hints = [_redirect(dart, v, a, b) for dart in hints]
        for x in (a, b):
            if len(adjacent[x]) == 2:
                queue.append(x)
    builder = Builder()
    new_of = {}
    for i in range(g0.n):
        if alive[i]:
            new_of[i] = builder.add_node(g0.labels[i])
    eid_of = {}
    for (a, b), w in sorted(weights.items()):
        eid_of[(a, b)] = builder.add_edge(new_of[a], new_of[b], w)
    for i in range(g0.n):
        if alive[i]:
            builder.rotation[new_of[i]] = [eid_of[(min(i, x), max(i, x))] for x in around[i]]
    builder.outer = [
        (eid_of[(min(t, h), max(t, h))], new_of[t])
        for t, h in hints
        if alive[t] and alive[h] and (min(t, h), max(t, h)) in eid_of
    ]
    chains = {}
    for (a, b), path in interior.items():
        la, lb = g0.labels[a], g0.labels[b]
        labels = tuple(g0.labels[i] for i in path)
        if la < lb:
            chains[(la, lb)] = labels
        else:
            chains[(lb, la)] = labels[::-1]
    result = builder.build()
    logger.debug('contracted', extra={'n': g0.n, 'contracted_n': result.n, 'removed': removed})
    return result, NodeMap(chains=chains)


def contract(g0):
    """Suppress degree-2 nodes whose neighbours are not adjacent, summing weights."""
    return contract_with_map(g0)[0]


def _split_nodes(g, plan, depth=None):
    """Replace each ``v`` in ``plan`` (index -> first neighbour index) by a zero-weight path."""
    builder = Builder()
    new_index = {}
    for i in range(g.n):
        if i not in plan:
            new_index[i] = builder.add_node(g.labels[i])
    next_label = fresh_label(g.labels)
    mapping = {}
    slot = {}
    paths = {}
    for v in sorted(plan):
        rot = g.rotation[v]
        start = rot.index(g.edge_id(v, plan[v]))
        order = rot[start:] + rot[:start]
        ids = []
        for eid in order:
            ids.append(builder.add_node(next_label))
            mapping[next_label] = g.labels[v]
            next_label += 1
            slot[(v, eid)] = ids[-1]
        paths[v] = (order, ids)

    def end(x, eid):
        return slot[(x, eid)] if x in plan else new_index[x]

    for eid, (u, v, w) in enumerate(g.edges):
        builder.add_edge(end(u, eid), end(v, eid), w)
    for i in range(g.n):
        if i not in plan:
            builder.rotation[new_index[i]] = list(g.rotation[i])
    for v, (order, ids) in paths.items():
        links = [builder.add_edge(ids[k], ids[k + 1], 0) for k in range(len(ids) - 1)]
        for k, node in enumerate(ids):
            rot = [order[k]]
            if k + 1 < len(ids):
                rot.append(links[k])
            if k > 0:
                rot.append(links[k - 1])
            builder.rotation[node] = rot
    # the outer faces of g stay outer
    builder.outer = [(eid, end(tail, eid)) for eid, tail in (face[0] for face in g.outer_faces())]
    result = builder.build()
    new_depth = None
    if depth is not None:
        new_depth = [0] * result.n
        for i in range(g.n):
            if i not in plan:
                new_depth[new_index[i]] = depth[i]
        for v, (_, ids) in paths.items():
            for node in ids:
                new_depth[node] = depth[v]
    return result, NodeMap(mapping), new_depth


def _opening_ok(g, v, p, depths):
    """The wedge before position ``p`` at ``v`` is external at v's level."""
    return depths.is_outer_wedge(v, (p - 1) % len(g.rotation[v]))


def min_depth_neighbor(g, v, depths):
    """Shallowest neighbour of index ``v`` whose preceding wedge is external.

    Splitting at such a neighbour opens the zero-weight path into the outer
    face of the peeled graph, so the radius stays put.  Ties go to the lowest
    label.
    """
    rot = g.rotation[v]
    lowest = min(depths[g.other(eid, v)] for eid in rot)
    options = sorted(
        (g.labels[g.other(eid, v)], p) for p, eid in enumerate(rot)
        if depths[g.other(eid, v)] == lowest
    )
    for label, p in options:
        if _opening_ok(g, v, p, depths):
            return g.index[label]
    logger.warning('no external wedge', extra={'node': g.labels[v], 'depth': lowest})
    return g.index[options[0][0]]


def reduce_degree(g, v, u1, depths=None):
    """Split node ``v`` (label) into a zero-weight path starting at neighbour ``u1``."""
    vi = g.index_of(v)
    ui = g.index_of(u1)
    d = g.degree(vi)
    if d < 4:
        raise DegreeTooSmall(f'Node {v} has degree {d}; reduce needs at least 4.')
    eid = g.edge_id(vi, ui)
    if eid is None:
        raise NotNeighbor(f'Node {u1} is not a neighbour of {v}.')
    depths = depths or outerplane_depths(g)
    lowest = min(depths[x] for x, _ in g.adjacency[vi])
    if depths[ui] != lowest:
        raise NotMinDepthNeighbor(
            f'Neighbour {u1} has depth {depths[ui]}, but depth {lowest} is available.'
        )
    if not _opening_ok(g, vi, g._rotation_positions[vi][eid], depths):
        raise NotMinDepthNeighbor(
            f'The wedge before neighbour {u1} is not on the outer face at depth {depths[vi]}.'
        )
    reduced = _split_nodes(g, {vi: ui})[0]
    after = outerplane_depths(reduced).radius
    if after != depths.radius:
        raise InvariantViolation(f'reduce at {v} moved the radius from {depths.radius} to {after}')
    return reduced


def slice_outerplane(g, depths=None):
    """Disjoint union of overlapping depth bands; returns (graph, band map)."""
    if any(e.weight < 1 for e in g.edges):
        raise PreconditionViolated('slice_outerplane needs positive weights.')
    if not is_biconnected(g):
        raise PreconditionViolated('slice_outerplane needs a biconnected graph.')
    if not is_contracted(g):
        raise PreconditionViolated('slice_outerplane needs a contracted graph.')
    depths = depths or outerplane_depths(g)
    dens = density(g)
    radius = depths.radius
    width = SLICE_FACTOR * dens
    if radius <= 2 * width:
        return g, {label: (0, label) for label in g.labels}
    builder = Builder()
    band_map = {}
    next_label = fresh_label(g.labels)
    band = 0
    while band * width < radius:
        low, high = band * width, (band + 2) * width
        members = [i for i, d in enumerate(depths.depth) if low < d <= high]
        sub, keep = restrict(g, members)
        new_of = {old: new for new, old in enumerate(keep)}
        first_level = math.floor(low) + 1
        hints = [
            (eid, tail) for eid, tail in depths.level_darts.get(first_level, [])
            if tail in new_of and g.other(eid, tail) in new_of
        ]
        ids = [builder.add_node(next_label + k) for k in range(sub.n)]
        for k, old in enumerate(keep):
            band_map[next_label + k] = (band, g.labels[old])
        next_label += sub.n
        base = len(builder.edges)
        for u, v, w in sub.edges:
            builder.add_edge(ids[u], ids[v], w)
        for k, rot in enumerate(sub.rotation):
            builder.rotation[ids[k]] = [base + eid for eid in rot]
        for eid, tail in hints:
            sub_eid = sub.edge_id(new_of[tail], new_of[g.other(eid, tail)])
            builder.outer.append((base + sub_eid, ids[new_of[tail]]))
        band += 1
    result = builder.build()
    logger.info(
        'sliced', extra={'radius': radius, 'bands': band, 'n': g.n, 'sliced_n': result.n}
    )
    return result, band_map


@dataclass
class ShortcutGirth:
    """Girth answered directly when expansion dwarfs the contracted size."""

    girth: object
    graph: PlaneGraph
    stats: dict = field(default_factory=dict)
    node_map: NodeMap = field(default_factory=NodeMap)


@dataclass
class NormalizedGraph:
    graph: PlaneGraph
    node_map: NodeMap
    stats: dict = field(default_factory=dict)


def normalize(g0):
    """Three-stage normalization of one unit-weight biconnected block."""
    if not g0.is_embedded:
        g0 = embed(g0)
    g, contract_map = contract_with_map(g0)
    stats = {'input_nodes': g0.n, 'contracted_nodes': g.n}
    n, m = g0.n, g.n
    if m >= 2 and n > m * math.log2(m) ** 2:
        stats['shortcut'] = True
        logger.info('shortcut taken', extra={'input_nodes': n, 'contracted_nodes': m})
        return ShortcutGirth(brute_girth(g), g, stats, contract_map)

    rounds = 0
    for _ in range(g.max_weight + 1):
        cap = max(1, math.ceil(SLICE_FACTOR * density(g)))
        if g.max_weight <= cap:
            break
        rounded = round_weights(g, cap)
        if rounded.max_weight >= g.max_weight:
            raise InvariantViolation('weight rounding failed to decrease wmax')
        g = rounded
        rounds += 1
    else:
        raise InvariantViolation('weight rounding did not converge')
    stats.update(rounding_iterations=rounds, density=str(density(g)), wmax=g.max_weight)

    g, band_map = slice_outerplane(g)
    node_map = NodeMap({label: origin for label, (_, origin) in band_map.items()}).then(contract_map)
    stats['bands'] = 1 + max((b for b, _ in band_map.values()), default=0)

    depths = outerplane_depths(g)
    plan = {v: min_depth_neighbor(g, v, depths) for v in range(g.n) if g.degree(v) >= 4}
    if plan:
        g, split_map, _ = _split_nodes(g, plan, depths.depth)
        node_map = split_map.then(node_map)
    stats.update(reduced_nodes=len(plan), nodes=g.n, edges=g.m)
    logger.info('normalized block', extra=stats)
    return NormalizedGraph(g, node_map, stats)
