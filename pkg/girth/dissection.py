"""Dissection trees: triangulation, fundamental-cycle splits and ``descend``."""
import logging
import math
from collections import deque
from dataclasses import dataclass, field

from graphs.exceptions import InvariantViolation, NotEmbedded, NotTriangulated
from graphs.planegraph import PlaneGraph, induced_subgraph, outerplane_depths

from .conf import EllPolicy

logger = logging.getLogger(__name__)


class _Vertex:
    __slots__ = ('nodes', 'left', 'right', 'carried')

    def __init__(self, nodes, left=None, right=None, carried=None):
        self.nodes = set(nodes)
        self.left = left
        self.right = right
        self.carried = carried

    @property
    def is_leaf(self):
        return self.left is None


class DissectionTree:
    """Frozen binary tree of label sets with below/above/inherit/border precomputed.

    Vertices are numbered in preorder; vertex 0 is the root.  ``carried``
    bounds, per leaf, how many labels ancestor separators pushed into it;
    it is None for hand-built trees.
    """

    def __init__(self, root):
        self.nodes = []
        self.left = []
        self.right = []
        self.parent = []
        self.depth = []
        self.carried = []
        stack = [(root, -1, 0)]
        while stack:
            vertex, parent, depth = stack.pop()
            vid = len(self.nodes)
            self.nodes.append(frozenset(vertex.nodes))
            self.left.append(None)
            self.right.append(None)
            self.parent.append(parent)
            self.depth.append(depth)
            self.carried.append(vertex.carried)
            if parent >= 0:
                if self.left[parent] is None:
                    self.left[parent] = vid
                else:
                    self.right[parent] = vid
            if not vertex.is_leaf:
                stack.append((vertex.right, vid, depth + 1))
                stack.append((vertex.left, vid, depth + 1))
        count = len(self.nodes)
        below = [None] * count
        for vid in reversed(range(count)):
            if self.is_leaf(vid):
                below[vid] = self.nodes[vid]
            else:
                below[vid] = self.nodes[vid] | below[self.left[vid]] | below[self.right[vid]]
        above = [frozenset()] * count
        for vid in range(1, count):
            p = self.parent[vid]
            above[vid] = above[p] | self.nodes[p]
        self.below = below
        self.above = above
        self.inherit = [above[v] & below[v] for v in range(count)]
        self.border = [
            self.inherit[v] if self.is_leaf(v) else self.nodes[v] | self.inherit[v]
            for v in range(count)
        ]

    def __len__(self):
        return len(self.nodes)

    def __repr__(self):
        return f'<DissectionTree vertices={len(self)} leaves={len(self.leaves())}>'

    @property
    def root(self):
        return 0

    def is_leaf(self, vid):
        return self.left[vid] is None

    def leaves(self):
        return [v for v in range(len(self)) if self.is_leaf(v)]

    def nonleaves(self):
        return [v for v in range(len(self)) if not self.is_leaf(v)]

    def postorder(self):
        return list(reversed(range(len(self))))

    def squares(self):
        return sum(len(self.nodes[v]) ** 2 for v in self.nonleaves())

    @property
    def height(self):
        return max(self.depth, default=0)

    def memberships(self):
        counts = {}
        for nodes in self.nodes:
            for label in nodes:
                counts[label] = counts.get(label, 0) + 1
        return counts

    def shape(self):
        """Nested (nodes, left, right) tuples; leaves are plain frozensets."""

        def build(vid):
            if self.is_leaf(vid):
                return self.nodes[vid]
            return (self.nodes[vid], build(self.left[vid]), build(self.right[vid]))

        return build(0)

    def with_extra(self, extra):
        """Copy with ``extra`` labels added to the root and every leaf.

        Inner vertices then carry them through ``inherit`` without growing
        their separators.
        """
        return DissectionTree(_thaw(self, 0, frozenset(extra), top=True))


def _thaw(tree, vid, extra=frozenset(), top=False):
    leaf = tree.is_leaf(vid)
    vertex = _Vertex(tree.nodes[vid] | extra if leaf or top else tree.nodes[vid])
    if leaf:
        if tree.carried[vid] is not None:
            vertex.carried = tree.carried[vid] + len(extra)
    else:
        vertex.left = _thaw(tree, tree.left[vid], extra)
        vertex.right = _thaw(tree, tree.right[vid], extra)
    return vertex


def tree_from_nested(nested):
    """Build a tree from ``leaf_set`` or ``(separator_set, left, right)``."""

    def build(item):
        if isinstance(item, tuple):
            nodes, left, right = item
            return _Vertex(nodes, build(left), build(right))
        return _Vertex(item)

    return DissectionTree(build(nested))


# DecompositionTree is a DissectionTree that only guarantees below(root) = V
# and that sibling below-sets are dissected by their parent.
DecompositionTree = DissectionTree


@dataclass
class SpanningTree:
    root: int
    parent: list
    depth: list

    def children(self):
        kids = [[] for _ in self.parent]
        for v, p in enumerate(self.parent):
            if p >= 0:
                kids[p].append(v)
        return kids

    def diameter(self):
        """Longest path in edges, by two sweeps."""
        if not self.parent:
            return 0
        adjacency = [[] for _ in self.parent]
        for v, p in enumerate(self.parent):
            if p >= 0:
                adjacency[v].append(p)
                adjacency[p].append(v)

        def farthest(start):
            dist = {start: 0}
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for y in adjacency[x]:
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        queue.append(y)
            end = max(dist, key=lambda k: (dist[k], -k))
            return end, dist[end]

        end, _ = farthest(self.root)
        return farthest(end)[1]


class _Surface:
    """Mutable neighbour-order rotation used while adding chords."""

    def __init__(self, g):
        self.n = g.n
        self.around = [[g.other(eid, v) for eid in g.rotation[v]] for v in range(g.n)]
        self.adjacent = [set(a) for a in self.around]

    def next_dart(self, dart):
        t, h = dart
        rot = self.around[h]
        return (h, rot[(rot.index(t) + 1) % len(rot)])

    def face(self, dart):
        walk = []
        current = dart
        while True:
            walk.append(current[0])
            current = self.next_dart(current)
            if current == dart:
                return walk

    def insert_after(self, node, after, new):
        rot = self.around[node]
        if after is None:
            rot.append(new)
        else:
            rot.insert(rot.index(after) + 1, new)
        self.adjacent[node].add(new)

    def add_chord(self, seq, p, q):
        """Chord seq[p]-seq[q] inside the face walk ``seq``; returns the two sub-walks."""
        a, b = seq[p], seq[q]
        self.insert_after(a, seq[p - 1], b)
        self.insert_after(b, seq[q - 1], a)
        first = seq[p:q + 1]
        second = seq[q:] + seq[:p + 1]
        return first, second

    def to_graph(self, labels, outer_dart=None):
        edges = []
        eid_of = {}
        for v in range(self.n):
            for x in self.around[v]:
                key = (min(v, x), max(v, x))
                if key not in eid_of:
                    eid_of[key] = len(edges)
                    edges.append((key[0], key[1], 1))
        rotation = [[eid_of[(min(v, x), max(v, x))] for x in self.around[v]] for v in range(self.n)]
        outer = []
        if outer_dart is not None:
            t, h = outer_dart
            outer.append((eid_of[(min(t, h), max(t, h))], t))
        return PlaneGraph(labels, edges, rotation, outer, validate=False)


def _choose_chord(surface, seq, anchor_rank):
    k = len(seq)

    def valid(p, q):
        a, b = seq[p], seq[q]
        return a != b and b not in surface.adjacent[a]

    anchors = sorted(range(k), key=lambda i: anchor_rank(seq[i]))
    best = anchors[0]
    for step in range(2, k - 1):
        q = (best + step) % k
        if valid(best, q):
            return (best, q) if best < q else (q, best)
    for i in range(k):
        if valid((i - 1) % k, (i + 1) % k):
            p, q = (i - 1) % k, (i + 1) % k
            return (p, q) if p < q else (q, p)
    for p in range(k):
        for q in range(p + 2, k):
            if (p, q) != (0, k - 1) and valid(p, q):
                return p, q
    raise NotTriangulated(f'No chord can split a face of length {k}.')


def _triangulate_face(surface, seq, anchor_rank):
    stack = [seq]
    while stack:
        walk = stack.pop()
        if len(walk) == 3 and len(set(walk)) == 3:
            continue
        p, q = _choose_chord(surface, walk, anchor_rank)
        stack.extend(surface.add_chord(walk, p, q))


def triangulate_low_diameter(g, r=None):
    """Triangulate ``g`` and grow a spanning tree from an external node ``u0``.

    Inner faces are fanned from their shallowest node, the outer face from
    ``u0``; the tree parents each node to a neighbour one level shallower.
    """
    if not g.is_embedded:
        raise NotEmbedded('Triangulation needs a rotation system.')
    if g.n <= 2:
        surface = _Surface(g)
        if g.n == 2 and g.m == 0:
            surface.insert_after(0, None, 1)
            surface.insert_after(1, None, 0)
        delta = surface.to_graph(g.labels)
        parent = [-1] + [0] * (g.n - 1)
        return delta, SpanningTree(0, parent, [0] + [1] * (g.n - 1))

    surface = _Surface(g)
    outer_faces = g.outer_faces()
    if outer_faces:
        anchor_face = outer_faces[0]
        _, t0 = anchor_face[0]
        pred = anchor_face[-1][1]
    else:
        t0, pred = 0, None
    comp = g.component_of
    linked = {comp[t0]}
    for face in outer_faces[1:]:
        _, tk = face[0]
        if comp[tk] in linked:
            continue
        surface.insert_after(t0, pred, tk)
        surface.insert_after(tk, face[-1][1], t0)
        linked.add(comp[tk])
        if pred is None:
            pred = tk
    for v in range(g.n):
        if comp[v] not in linked:
            surface.insert_after(t0, pred, v)
            surface.insert_after(v, None, t0)
            linked.add(comp[v])
            if pred is None:
                pred = v
    if pred is None:
        raise NotTriangulated('Graph has no edges to anchor the outer face.')

    connected = surface.to_graph(g.labels, (pred, t0))
    depths = outerplane_depths(connected)
    depth = depths.depth

    outer_dart = (pred, t0)
    seen = set()
    faces = []
    for v in range(g.n):
        for x in surface.around[v]:
            if (v, x) in seen:
                continue
            walk = []
            dart = (v, x)
            while dart not in seen:
                seen.add(dart)
                walk.append(dart)
                dart = surface.next_dart(dart)
            faces.append(walk)
    for walk in faces:
        seq = [t for t, _ in walk]
        if outer_dart in walk:
            start = seq.index(t0)
            seq = seq[start:] + seq[:start]
            _triangulate_face(
                surface, seq, lambda x: (x != t0, depth[x], g.labels[x])
            )
        else:
            _triangulate_face(surface, seq, lambda x: (depth[x], g.labels[x]))

    delta = surface.to_graph(g.labels, outer_dart)
    tree = _spanning_tree(delta, t0)
    diameter = tree.diameter()
    radius = max(r or 0, depths.radius)
    if diameter > 4 * radius + 2:
        raise InvariantViolation(
            f'Spanning tree diameter {diameter} exceeds the bound for radius {radius}.'
        )
    logger.debug(
        'triangulated', extra={'n': delta.n, 'm': delta.m, 'tree_diameter': diameter}
    )
    return delta, tree


def _spanning_tree(delta, u0):
    depth = outerplane_depths(delta).depth
    parent = [-1] * delta.n
    tree_depth = [0] * delta.n
    for x, _ in delta.adjacency[u0]:
        parent[x] = u0
    for v in range(delta.n):
        if v == u0 or parent[v] != -1:
            continue
        options = [x for x, _ in delta.adjacency[v] if depth[x] == depth[v] - 1]
        if not options:
            options = [x for x, _ in delta.adjacency[v] if depth[x] < depth[v]]
        if not options:
            raise InvariantViolation(f'Node {delta.labels[v]} has no shallower neighbour.')
        parent[v] = min(options, key=lambda x: (depth[x], delta.labels[x]))
    order = deque([u0])
    children = [[] for _ in range(delta.n)]
    for v, p in enumerate(parent):
        if p >= 0:
            children[p].append(v)
    reached = 1
    while order:
        x = order.popleft()
        for y in children[x]:
            tree_depth[y] = tree_depth[x] + 1
            order.append(y)
            reached += 1
    if reached != delta.n:
        raise InvariantViolation('Parent pointers do not form a spanning tree.')
    return SpanningTree(u0, parent, tree_depth)


def _best_cycle(delta, tree):
    """Fundamental cycle minimising its larger side: (cycle, inside, outside) index sets."""
    faces = delta.faces()
    face_of = {}
    for f, face in enumerate(faces):
        for dart in face:
            face_of[dart] = f
    tree_edges = {delta.edge_id(v, p) for v, p in enumerate(tree.parent) if p >= 0}
    dual = [[] for _ in faces]
    for eid, (u, v, _) in enumerate(delta.edges):
        if eid in tree_edges:
            continue
        a, b = face_of[(eid, u)], face_of[(eid, v)]
        dual[a].append((b, eid))
        dual[b].append((a, eid))
    dual_parent = [None] * len(faces)
    dual_parent[0] = (-1, -1)
    order = [0]
    for f in order:
        for h, eid in dual[f]:
            if dual_parent[h] is None:
                dual_parent[h] = (f, eid)
                order.append(h)
    size = [1] * len(faces)
    for f in reversed(order[1:]):
        size[dual_parent[f][0]] += size[f]
    child_face = {dual_parent[f][1]: f for f in order[1:]}

    def cycle_nodes(u, v):
        left, right = [u], [v]
        while tree.depth[u] > tree.depth[v]:
            u = tree.parent[u]
            left.append(u)
        while tree.depth[v] > tree.depth[u]:
            v = tree.parent[v]
            right.append(v)
        while u != v:
            u, v = tree.parent[u], tree.parent[v]
            left.append(u)
            right.append(v)
        return left + right[-2::-1]

    n = delta.n
    best = None
    for eid, f in sorted(child_face.items()):
        u, v, _ = delta.edges[eid]
        k = len(cycle_nodes(u, v))
        inside = (size[f] - k) // 2 + 1
        outside = n - k - inside
        rank = (max(inside, outside), eid)
        if best is None or rank < best[0]:
            best = (rank, eid, f)
    if best is None:
        raise NotTriangulated('Spanning tree leaves no non-tree edge.')
    _, eid, f = best
    u, v, _ = delta.edges[eid]
    cycle = set(cycle_nodes(u, v))
    inside_faces = []
    stack = [f]
    while stack:
        x = stack.pop()
        inside_faces.append(x)
        stack.extend(h for h, e in dual[x] if dual_parent[h] == (x, e))
    inside = {tail for x in inside_faces for _, tail in faces[x]} - cycle
    outside = set(range(n)) - cycle - inside
    return cycle, inside, outside


def decomposition_tree(delta, tree, ell):
    """Split by fundamental cycles until every piece has at most ``ell`` nodes."""
    limit = ell.ell(delta.n) if isinstance(ell, EllPolicy) else int(ell)
    root = _Vertex(())
    stack = [(root, delta, tree)]
    splits = 0
    while stack:
        vertex, piece, piece_tree = stack.pop()
        if piece.n <= limit or piece.n < 3:
            vertex.nodes = set(piece.labels)
            continue
        cycle, inside, outside = _best_cycle(piece, piece_tree)
        splits += 1
        vertex.nodes = {piece.labels[i] for i in cycle}
        vertex.left = _Vertex(())
        vertex.right = _Vertex(())
        for child, side in ((vertex.left, inside), (vertex.right, outside)):
            labels = [piece.labels[i] for i in sorted(side)]
            sub = induced_subgraph(piece, labels)
            if sub.n == 0:
                continue
            sub_delta, sub_tree = triangulate_low_diameter(sub)
            stack.append((child, sub_delta, sub_tree))
    logger.debug('decomposition tree', extra={'splits': splits, 'limit': limit})
    return DissectionTree(root)


def _sides(g, nodes, only_left, only_right):
    """Place each separator node: 'left', 'right' or 'both' (it stays)."""
    side = {}
    for label in nodes:
        around = g.neighbor_labels(label)
        on_left = any(x in only_left for x in around)
        on_right = any(x in only_right for x in around)
        if on_left and on_right:
            side[label] = 'both'
        elif on_left or on_right:
            side[label] = 'left' if on_left else 'right'
    for label in nodes:
        if side.get(label) != 'left':
            continue
        for x in g.neighbor_labels(label):
            if side.get(x) == 'right':
                side[min(label, x)] = 'both'
                if side[label] == 'both':
                    break
    pending = [label for label in nodes if label not in side]
    changed = True
    while changed:
        changed = False
        for label in pending:
            if label in side:
                continue
            seen = {side[x] for x in g.neighbor_labels(label) if side.get(x) in ('left', 'right')}
            if seen:
                side[label] = seen.pop() if len(seen) == 1 else 'both'
                changed = True
    for label in pending:
        side.setdefault(label, 'right')
    return side


def descend(t, g):
    """Sink separator nodes toward the sides they touch.

    A node stays only when it has neighbours private to both sides or when
    a neighbour in the same separator goes the other way; each stay lowers
    its degree in both children.  Leaves record how many labels their
    ancestors' separators could carry into them.
    """
    vertices = [_Vertex(nodes) for nodes in t.nodes]
    for vid in range(len(t)):
        if t.is_leaf(vid):
            carried = 0
            v = vid
            while t.parent[v] >= 0:
                v = t.parent[v]
                carried += len(t.nodes[v])
            vertices[vid].carried = carried
        else:
            vertices[vid].left = vertices[t.left[vid]]
            vertices[vid].right = vertices[t.right[vid]]

    for vid in range(len(t)):
        if t.is_leaf(vid):
            continue
        left, right = t.left[vid], t.right[vid]
        nodes = sorted(vertices[vid].nodes)
        current = frozenset(nodes)
        side = _sides(g, nodes, t.below[left] - current, t.below[right] - current)
        for label in nodes:
            place = side[label]
            if place != 'both':
                vertices[vid].nodes.discard(label)
            if place in ('left', 'both'):
                vertices[left].nodes.add(label)
            if place in ('right', 'both'):
                vertices[right].nodes.add(label)
    return DissectionTree(_prune(vertices[0]))


def _prune(vertex):
    """Drop nonleaf vertices whose child has an empty below-set."""

    def below_empty(v):
        if v.nodes:
            return False
        return v.is_leaf or (below_empty(v.left) and below_empty(v.right))

    stack = [vertex]
    root_holder = _Vertex(())
    root_holder.left = vertex
    parents = {id(vertex): (root_holder, 'left')}
    while stack:
        v = stack.pop()
        if v.is_leaf:
            continue
        if below_empty(v.left) or below_empty(v.right):
            keep = v.right if below_empty(v.left) else v.left
            holder, side = parents[id(v)]
            setattr(holder, side, keep)
            parents[id(keep)] = (holder, side)
            stack.append(keep)
            continue
        parents[id(v.left)] = (v, 'left')
        parents[id(v.right)] = (v, 'right')
        stack.extend([v.left, v.right])
    return root_holder.left


def build_dissection(g, r, ell):
    """Triangulate, decompose, then descend; one leaf when ``g`` is small."""
    limit = ell.ell(g.n) if isinstance(ell, EllPolicy) else int(ell)
    if g.n <= limit:
        return DissectionTree(_Vertex(g.labels, carried=0))
    delta, tree = triangulate_low_diameter(g, r)
    t = decomposition_tree(delta, tree, limit)
    result = descend(t, g)
    logger.info(
        'dissection tree built',
        extra={'n': g.n, 'limit': limit, 'vertices': len(result), 'height': result.height},
    )
    return result


@dataclass
class DissectionReport:
    ok: bool = True
    violations: list = field(default_factory=list)
    measured: dict = field(default_factory=dict)

    def fail(self, message):
        self.ok = False
        self.violations.append(message)

    def as_dict(self):
        return {'ok': self.ok, 'violations': self.violations, 'measured': self.measured}


def validate_dissection(t, g, r, ell):
    """Check the structural properties of ``t`` over ``g`` and record the size constants."""
    report = DissectionReport()
    labels = set(g.labels)
    if t.below[t.root] != labels:
        report.fail('below(root) differs from V(G)')
    for vid in t.nonleaves():
        left, right = t.left[vid], t.right[vid]
        s = t.nodes[vid]
        if not s <= (t.below[left] & t.below[right]):
            report.fail(f'vertex {vid}: separator not inside both children')
        if t.below[vid] != s | t.below[left] | t.below[right]:
            report.fail(f'vertex {vid}: below-set recurrence broken')
        only_right = t.below[right] - s
        for label in t.below[left] - s:
            if any(x in only_right for x in g.neighbor_labels(label)):
                report.fail(f'vertex {vid}: sides joined by an edge at node {label}')
                break
        if not s <= (t.border[left] & t.border[right]):
            report.fail(f'vertex {vid}: separator not inside both child borders')
        if not t.border[vid] <= (t.border[left] | t.border[right]):
            report.fail(f'vertex {vid}: border not covered by child borders')
    memberships = t.memberships()
    worst = 0
    for label, count in sorted(memberships.items()):
        deg = len(g.neighbor_labels(label))
        worst = max(worst, count - deg - 1)
        if count > max(1, 2 ** deg - 1):
            report.fail(f'node {label} lies in {count} vertices')
    deepest = _path_memberships(t)
    for label, count in sorted(deepest.items()):
        if count > len(g.neighbor_labels(label)) + 1:
            report.fail(f'node {label} lies in {count} vertices of one root-to-leaf path')
    m = max(g.n, 2)
    limit = ell.ell(g.n) if isinstance(ell, EllPolicy) else int(ell)
    leaves = t.leaves()
    for vid in leaves:
        allowed = limit + (t.carried[vid] or 0)
        if len(t.nodes[vid]) > allowed:
            report.fail(f'leaf {vid} has {len(t.nodes[vid])} nodes, more than {allowed}')
    nonleaves = t.nonleaves()
    max_sep = max((len(t.nodes[v]) for v in nonleaves), default=0)
    max_s_border = max((len(t.nodes[v]) + len(t.border[v]) for v in nonleaves), default=0)
    squares = t.squares()
    if squares > len(t) * max_sep ** 2:
        report.fail('squares(T) exceeds |V(T)| * max|S|^2')
    report.measured = {
        'vertices': len(t),
        'leaves': len(leaves),
        'height': t.height,
        'max_leaf': max((len(t.nodes[v]) for v in leaves), default=0),
        'min_leaf': min((len(t.nodes[v]) for v in leaves), default=0),
        'sum_leaf_border': sum(len(t.border[v]) for v in leaves),
        'max_s_plus_border': max_s_border,
        'squares': squares,
        'max_memberships': max(memberships.values(), default=0),
        'memberships_over_degree_plus_one': worst,
        'ell': limit,
        'c_leaf': round(max((len(t.nodes[v]) for v in leaves), default=0) / limit, 3),
        'c_vertices': round(len(t) * limit / m, 3),
        'c_border': round(max_s_border / (max(r, 1) * math.log2(m)), 3),
    }
    return report


def _path_memberships(t):
    """Per label, the most vertices holding it along one root-to-leaf path."""
    deepest = {}
    stack = [(t.root, {})]
    while stack:
        vid, counts = stack.pop()
        counts = dict(counts)
        for label in t.nodes[vid]:
            counts[label] = counts.get(label, 0) + 1
        if t.is_leaf(vid):
            for label, count in counts.items():
                deepest[label] = max(deepest.get(label, 0), count)
        else:
            stack.append((t.left[vid], counts))
            stack.append((t.right[vid], counts))
    return deepest
