"""Plane graphs: weighted simple graphs carrying a rotation system.

Nodes are indexed ``0..n-1`` internally; ``labels[i]`` is the opaque external
identifier that survives every transform.  A dart is a pair ``(edge id, tail
index)``.  Faces are traced with the rule "arriving at ``h`` over edge ``e``,
leave over the edge following ``e`` in the rotation of ``h``".
"""
import logging
from collections import deque
from functools import cached_property
from typing import NamedTuple

import networkx as nx

from .distance import INFINITY
from .exceptions import (
    NegativeWeight,
    NonSimple,
    NotEmbedded,
    NotPlanar,
    UnknownEdge,
    UnknownNode,
)

logger = logging.getLogger(__name__)


class Edge(NamedTuple):
    u: int
    v: int
    weight: int


class PlaneGraph:
    """Immutable weighted simple graph with an optional rotation system."""

    def __init__(self, labels, edges, rotation=None, outer=(), validate=True):
        self.labels = tuple(labels)
        self.edges = tuple(Edge(u, v, w) for u, v, w in edges)
        self.rotation = None if rotation is None else tuple(tuple(r) for r in rotation)
        # hint darts lying on the outer face, at most one per component is used
        self.outer = tuple(outer)
        if validate:
            self.check()

    def __repr__(self):
        state = 'embedded' if self.is_embedded else 'abstract'
        return f'<PlaneGraph n={self.n} m={self.m} {state}>'

    @property
    def n(self):
        return len(self.labels)

    @property
    def m(self):
        return len(self.edges)

    @property
    def is_embedded(self):
        return self.rotation is not None

    @cached_property
    def index(self):
        return {label: i for i, label in enumerate(self.labels)}

    @cached_property
    def adjacency(self):
        adj = [[] for _ in range(self.n)]
        for eid, (u, v, _) in enumerate(self.edges):
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        return adj

    @cached_property
    def edge_lookup(self):
        return {(min(u, v), max(u, v)): eid for eid, (u, v, _) in enumerate(self.edges)}

    @cached_property
    def _rotation_positions(self):
        return [{eid: p for p, eid in enumerate(rot)} for rot in self.rotation]

    @cached_property
    def total_weight(self):
        return sum(e.weight for e in self.edges)

    @cached_property
    def max_weight(self):
        return max((e.weight for e in self.edges), default=0)

    @property
    def is_unit_weighted(self):
        return all(e.weight == 1 for e in self.edges)

    def index_of(self, label):
        try:
            return self.index[label]
        except KeyError:
            raise UnknownNode(f'Node {label} is not in the graph.') from None

    def degree(self, i):
        return len(self.adjacency[i])

    def other(self, eid, i):
        u, v, _ = self.edges[eid]
        return v if i == u else u

    def weight(self, eid):
        return self.edges[eid].weight

    def edge_id(self, i, j):
        """Edge id joining indices ``i`` and ``j``, or None."""
        return self.edge_lookup.get((min(i, j), max(i, j)))

    def edge_key(self, eid):
        """Label pair identifying an edge across subgraphs of one graph."""
        u, v, _ = self.edges[eid]
        a, b = self.labels[u], self.labels[v]
        return (a, b) if a < b else (b, a)

    def edge_by_key(self, key):
        a, b = key
        eid = None
        if a in self.index and b in self.index:
            eid = self.edge_id(self.index[a], self.index[b])
        if eid is None:
            raise UnknownEdge(f'Edge {key} is not in the graph.')
        return eid

    def label_weight(self, a, b):
        """Weight of the edge between labels ``a`` and ``b``; INFINITY if absent."""
        i, j = self.index.get(a), self.index.get(b)
        if i is None or j is None:
            return INFINITY
        eid = self.edge_id(i, j)
        return INFINITY if eid is None else self.edges[eid].weight

    def neighbor_labels(self, label):
        i = self.index_of(label)
        return sorted(self.labels[j] for j, _ in self.adjacency[i])

    # --- embedding --------------------------------------------------------

    def head(self, dart):
        eid, tail = dart
        return self.other(eid, tail)

    def next_dart(self, dart):
        eid, tail = dart
        h = self.other(eid, tail)
        rot = self.rotation[h]
        p = self._rotation_positions[h][eid]
        return (rot[(p + 1) % len(rot)], h)

    def faces(self):
        """All faces as lists of darts."""
        if not self.is_embedded:
            raise NotEmbedded('Faces need a rotation system.')
        seen = set()
        faces = []
        for eid, (u, v, _) in enumerate(self.edges):
            for tail in (u, v):
                dart = (eid, tail)
                if dart in seen:
                    continue
                face = []
                while dart not in seen:
                    seen.add(dart)
                    face.append(dart)
                    dart = self.next_dart(dart)
                faces.append(face)
        return faces

    @cached_property
    def component_of(self):
        comp = [-1] * self.n
        count = 0
        for start in range(self.n):
            if comp[start] != -1:
                continue
            comp[start] = count
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for y, _ in self.adjacency[x]:
                    if comp[y] == -1:
                        comp[y] = count
                        queue.append(y)
            count += 1
        return comp

    @property
    def component_count(self):
        return max(self.component_of, default=-1) + 1

    def euler_ok(self):
        """n - m + f = 1 + c, counting one shared outer face."""
        traced = len(self.faces())
        isolated = sum(1 for adj in self.adjacency if not adj)
        c = self.component_count
        return self.n - self.m + traced + isolated == 2 * c

    def outer_faces(self):
        """One outer face per component that has edges.

        A hint dart from ``outer`` wins; otherwise the face with the most
        boundary edges, ties going to the face holding the lowest edge id.
        """
        faces = self.faces()
        face_of = {}
        for f, face in enumerate(faces):
            for dart in face:
                face_of[dart] = f
        chosen = {}
        for dart in self.outer:
            eid, tail = dart
            if eid >= self.m or tail not in self.edges[eid][:2]:
                continue
            comp = self.component_of[tail]
            chosen.setdefault(comp, face_of[dart])
        best = {}
        for f, face in enumerate(faces):
            comp = self.component_of[face[0][1]]
            if comp in chosen:
                continue
            rank = (len(face), -min(eid for eid, _ in face))
            if comp not in best or rank > best[comp][0]:
                best[comp] = (rank, f)
        for comp, (_, f) in best.items():
            chosen[comp] = f
        return [faces[chosen[comp]] for comp in sorted(chosen)]

    # --- validation and conversion ----------------------------------------

    def check(self):
        """Validate simplicity, weights and (if present) the rotation system."""
        if len(self.index) != self.n:
            raise NonSimple('Node labels must be unique.')
        seen = set()
        for eid, (u, v, w) in enumerate(self.edges):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise UnknownNode(f'Edge {eid} references a missing node.')
            if u == v:
                raise NonSimple(f'Edge {eid} is a self-loop at node {self.labels[u]}.')
            key = (min(u, v), max(u, v))
            if key in seen:
                raise NonSimple(
                    f'Parallel edge between {self.labels[u]} and {self.labels[v]}.'
                )
            seen.add(key)
            if not isinstance(w, int) or w < 0:
                raise NegativeWeight(f'Edge {eid} has invalid weight {w}.')
        if self.rotation is None:
            return
        if len(self.rotation) != self.n:
            raise NotEmbedded('Rotation must list every node.')
        for i, rot in enumerate(self.rotation):
            incident = sorted(eid for _, eid in self.adjacency[i])
            if sorted(rot) != incident:
                raise NotEmbedded(
                    f'Rotation of node {self.labels[i]} does not list its incident edges exactly once.'
                )
        if not self.euler_ok():
            raise NotPlanar('Rotation system fails the Euler check.')

    def to_networkx(self):
        graph = nx.Graph()
        graph.add_nodes_from(self.labels)
        for eid, (u, v, w) in enumerate(self.edges):
            graph.add_edge(self.labels[u], self.labels[v], weight=w, eid=eid)
        return graph

    def with_weights(self, weights):
        edges = [(u, v, w) for (u, v, _), w in zip(self.edges, weights)]
        return PlaneGraph(self.labels, edges, self.rotation, self.outer, validate=False)

    def without_rotation(self):
        return PlaneGraph(self.labels, self.edges, None, validate=False)


class Builder:
    """Incremental construction helper used by the transforms."""

    def __init__(self):
        self.labels = []
        self.edges = []
        self.rotation = []
        self.index = {}
        self.outer = []

    def add_node(self, label):
        i = len(self.labels)
        self.labels.append(label)
        self.rotation.append([])
        self.index[label] = i
        return i

    def add_edge(self, u, v, weight):
        self.edges.append((u, v, weight))
        return len(self.edges) - 1

    def build(self, embedded=True, validate=False):
        rotation = self.rotation if embedded else None
        return PlaneGraph(self.labels, self.edges, rotation, self.outer, validate=validate)


def fresh_label(labels):
    return max(labels, default=0) + 1


def restrict(g, indices):
    """Induced subgraph on node indices, plus the new-to-old index list."""
    keep = sorted(set(indices))
    new_of = {old: new for new, old in enumerate(keep)}
    edges = []
    edge_map = {}
    for eid, (u, v, w) in enumerate(g.edges):
        if u in new_of and v in new_of:
            edge_map[eid] = len(edges)
            edges.append((new_of[u], new_of[v], w))
    rotation = None
    outer = ()
    if g.is_embedded:
        rotation = [
            [edge_map[eid] for eid in g.rotation[old] if eid in edge_map] for old in keep
        ]
        outer = tuple(
            (edge_map[eid], new_of[tail]) for eid, tail in g.outer if eid in edge_map
        )
    labels = [g.labels[old] for old in keep]
    return PlaneGraph(labels, edges, rotation, outer, validate=False), keep


def induced_subgraph(g, s):
    """G[s] for a set of labels; rotation restricted, labels preserved."""
    indices = [g.index_of(label) for label in s]
    return restrict(g, indices)[0]


def embed(g):
    """Return ``g`` with a planar rotation system."""
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from((u, v) for u, v, _ in g.edges)
    planar, embedding = nx.check_planarity(graph, counterexample=True)
    if not planar:
        witness = sorted(g.labels[i] for i in embedding.nodes)
        raise NotPlanar(f'Graph is not planar; Kuratowski subgraph on nodes {witness}.')
    rotation = []
    for i in range(g.n):
        order = list(embedding.neighbors_cw_order(i)) if g.adjacency[i] else []
        rotation.append([g.edge_id(i, j) for j in order])
    embedded = PlaneGraph(g.labels, g.edges, rotation, validate=False)
    if not embedded.euler_ok():
        raise NotPlanar('Computed embedding fails the Euler check.')
    logger.debug('embedded graph', extra={'n': g.n, 'm': g.m})
    return embedded


def biconnected_components(g):
    """Blocks of ``g`` (bridges included) as induced subgraphs."""
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from((u, v) for u, v, _ in g.edges)
    blocks = [sorted(block) for block in nx.biconnected_components(graph)]
    blocks.sort(key=lambda block: min(g.labels[i] for i in block))
    return [restrict(g, block)[0] for block in blocks]


class DepthMap:
    """Outerplane depth per node index.

    ``level_darts`` holds one dart per traced outer face; ``wedges[i]`` lists
    the rotation positions ``p`` of node ``i`` whose wedge between ``rot[p]``
    and ``rot[p + 1]`` lies on the outer face once the shallower levels are
    peeled.
    """

    def __init__(self, labels, depth, level_darts, wedges=None):
        self.labels = labels
        self.depth = tuple(depth)
        self.level_darts = level_darts
        self.wedges = wedges

    def __getitem__(self, i):
        return self.depth[i]

    def of(self, label, graph):
        return self.depth[graph.index_of(label)]

    @property
    def radius(self):
        return max(self.depth, default=0)

    def as_labels(self):
        return dict(zip(self.labels, self.depth))

    def is_outer_wedge(self, i, p):
        return self.wedges is not None and p in self.wedges[i]


def outerplane_depths(g):
    """Peel the outer boundary level by level."""
    if not g.is_embedded:
        raise NotEmbedded('Outerplane depth needs a rotation system.')
    depth = [0] * g.n
    wedges = [set() for _ in range(g.n)]
    level_darts = {1: []}
    frontier = []
    for face in g.outer_faces():
        level_darts[1].append(face[0])
        for eid, tail in face:
            h = g.other(eid, tail)
            wedges[h].add(g._rotation_positions[h][eid])
            if depth[tail] == 0:
                depth[tail] = 1
                frontier.append(tail)
    for i, adj in enumerate(g.adjacency):
        if not adj:
            depth[i] = 1
    level = 1
    while frontier:
        nxt_level = level + 1

        def alive(x):
            return depth[x] == 0 or depth[x] == nxt_level

        seen = set()
        upcoming = []
        candidates = sorted({x for u in frontier for x, _ in g.adjacency[u] if depth[x] == 0})
        for v in candidates:
            rot = g.rotation[v]
            live = [p for p, eid in enumerate(rot) if alive(g.other(eid, v))]
            if not live:
                wedges[v].update(range(len(rot)))
                if depth[v] == 0:
                    depth[v] = nxt_level
                    upcoming.append(v)
                continue
            for k, p in enumerate(live):
                prev = live[k - 1]
                gap = (p - prev - 1) % len(rot) if len(live) > 1 else len(rot) - 1
                if not any(
                    not alive(g.other(rot[(prev + 1 + s) % len(rot)], v)) for s in range(gap)
                ):
                    continue
                start = (rot[p], v)
                if start in seen:
                    continue
                level_darts.setdefault(nxt_level, []).append(start)
                dart = start
                while True:
                    seen.add(dart)
                    eid, tail = dart
                    if depth[tail] == 0:
                        depth[tail] = nxt_level
                        upcoming.append(tail)
                    h = g.other(eid, tail)
                    hrot = g.rotation[h]
                    q = g._rotation_positions[h][eid]
                    for step in range(1, len(hrot) + 1):
                        wedges[h].add((q + step - 1) % len(hrot))
                        cand = hrot[(q + step) % len(hrot)]
                        if alive(g.other(cand, h)):
                            break
                    dart = (cand, h)
                    if dart == start:
                        break
        frontier = upcoming
        level = nxt_level
    missing = [g.labels[i] for i, d in enumerate(depth) if d == 0]
    if missing:
        raise NotEmbedded(f'Peeling left nodes without depth: {missing[:5]}')
    return DepthMap(g.labels, depth, level_darts, tuple(frozenset(w) for w in wedges))
