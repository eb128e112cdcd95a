"""Border problems: per-leaf distance tables and the bottom-up switch-round merge.

For a tree vertex ``S`` the border problem asks, for ``u, v`` in
``border(S)``, the distance in ``G[below(S)]``, an edge at ``u`` starting a
min-weight path, and the distance once a single edge near the border is
removed.  Edges are named by their label pair so tables from different
subgraphs of one graph agree.
"""
import heapq
import logging
from dataclasses import dataclass, field

import networkx as nx

from graphs.distance import INFINITY, dist_add
from graphs.exceptions import InclusionViolated, UnknownNode
from graphs.planegraph import induced_subgraph

from .conf import EllPolicy

logger = logging.getLogger(__name__)


class DistanceOracle:
    """Shortest-path queries over one graph with temporary weight overrides.

    Source trees are memoised and dropped whenever a weight changes.
    """

    def __init__(self, h):
        self.graph = h
        self._nx = h.to_networkx()
        self._overrides = {}
        self._trees = {}

    def _weight(self, a, b, data):
        w = self._overrides.get(data['eid'], data['weight'])
        return None if w is INFINITY else w

    def _tree(self, source):
        if source not in self._nx:
            raise UnknownNode(f'Node {source} is not in the oracle graph.')
        tree = self._trees.get(source)
        if tree is None:
            tree = nx.single_source_dijkstra(self._nx, source, weight=self._weight)
            self._trees[source] = tree
        return tree

    def distance(self, u, v):
        if v not in self._nx:
            raise UnknownNode(f'Node {v} is not in the oracle graph.')
        return self._tree(u)[0].get(v, INFINITY)

    def path(self, u, v):
        """Labels of one min-weight path, or None when ``v`` is unreachable."""
        if v not in self._nx:
            raise UnknownNode(f'Node {v} is not in the oracle graph.')
        return self._tree(u)[1].get(v)

    def first_edge(self, u, v):
        path = self.path(u, v)
        if path is None or len(path) < 2:
            return None
        a, b = path[0], path[1]
        return (a, b) if a < b else (b, a)

    def set_weight(self, e, w):
        eid = self.graph.edge_by_key(e)
        if w == self.graph.weight(eid):
            self._overrides.pop(eid, None)
        else:
            self._overrides[eid] = w
        self._trees.clear()


def oracle_build(h):
    return DistanceOracle(h)


def oracle_distance(o, u, v):
    return o.distance(u, v)


def oracle_set_weight(o, e, w):
    o.set_weight(e, w)


@dataclass
class BorderSolution:
    """Distance tables over ``border``; avoided edges are label pairs.

    Tables are sparse: ``dist`` holds finite off-diagonal pairs only and
    ``dist_avoiding`` only the entries that differ from ``dist``.
    """

    border: frozenset
    dist: dict = field(default_factory=dict)
    first_edge: dict = field(default_factory=dict)
    dist_avoiding: dict = field(default_factory=dict)
    avoided: frozenset = frozenset()

    @classmethod
    def build(cls, border, dist, first_edge=None, dist_avoiding=None, avoided=frozenset()):
        """Normalized solution: diagonal, infinite and unchanged entries are dropped."""
        border = frozenset(border)
        dist = {k: d for k, d in dist.items() if k[0] != k[1] and d is not INFINITY}
        first = {k: e for k, e in (first_edge or {}).items() if k in dist and e is not None}
        avoiding = {
            k: d for k, d in (dist_avoiding or {}).items()
            if k[0] != k[1] and d != dist.get((k[0], k[1]), INFINITY)
        }
        return cls(border, dist, first, avoiding, frozenset(avoided))

    def d(self, u, v):
        if u == v and u in self.border:
            return 0
        return self.dist.get((u, v), INFINITY)

    def e(self, u, v):
        return self.first_edge.get((u, v))

    def d_avoiding(self, u, v, e):
        """Distance without ``e``; edges outside this subgraph change nothing."""
        if e in self.avoided:
            return self.dist_avoiding.get((u, v, e), self.d(u, v))
        return self.d(u, v)

    def restricted(self, nodes):
        nodes = frozenset(nodes)
        return BorderSolution(
            nodes,
            {k: d for k, d in self.dist.items() if k[0] in nodes and k[1] in nodes},
            {k: e for k, e in self.first_edge.items() if k[0] in nodes and k[1] in nodes},
            {k: d for k, d in self.dist_avoiding.items() if k[0] in nodes and k[1] in nodes},
            self.avoided,
        )

    def cycle_candidate(self, u, v):
        e = self.e(u, v)
        if e is None:
            return INFINITY
        return dist_add(self.d(u, v), self.d_avoiding(u, v, e))


def border_edges(g, border, inside):
    """Label-pair keys of the edges of ``G[inside]`` touching ``border``."""
    keys = set()
    for x in border:
        for y in g.neighbor_labels(x):
            if y in inside:
                keys.add((x, y) if x < y else (y, x))
    return frozenset(keys)


def _edge(a, b):
    return (a, b) if a < b else (b, a)


def solve_leaf_border(g, t, leaf, bound=INFINITY):
    """Tables for a leaf: all pairs, then once per removed border edge."""
    h = induced_subgraph(g, sorted(t.nodes[leaf]))
    return border_tables(h, t.border[leaf], bound)


def _tree_uses(paths, a, b):
    path = paths.get(b)
    return path is not None and len(path) >= 2 and path[-2] == a


def border_tables(h, border, bound=INFINITY):
    """Border tables of the whole graph ``h`` over the labels in ``border``.

    Only values below ``bound`` are kept.  Removing a border edge reruns
    Dijkstra only from the sources whose shortest-path tree contains it.
    """
    border = frozenset(border)
    graph = h.to_networkx()
    cutoff = None if bound is INFINITY else bound - 1
    ordered = sorted(border)
    dist, first, trees = {}, {}, {}
    for u in ordered:
        lengths, paths = nx.single_source_dijkstra(graph, u, cutoff=cutoff, weight='weight')
        trees[u] = paths
        for v in ordered:
            if v != u and v in lengths:
                dist[u, v] = lengths[v]
                first[u, v] = _edge(paths[v][0], paths[v][1])
    avoided = border_edges(h, border, set(h.labels))
    avoiding = {}
    for e in sorted(avoided):
        a, b = e
        data = dict(graph.edges[a, b])
        graph.remove_edge(a, b)
        for u in ordered:
            if not (_tree_uses(trees[u], a, b) or _tree_uses(trees[u], b, a)):
                continue
            lengths = nx.single_source_dijkstra_path_length(graph, u, cutoff=cutoff, weight='weight')
            for v in ordered:
                if v != u:
                    avoiding[u, v, e] = lengths.get(v, INFINITY)
        graph.add_edge(a, b, **data)
    return BorderSolution.build(border, dist, first, avoiding, avoided)


def _switch_tables(border, separator, base, rounds):
    """Yield the tables for 0, 1, ..., ``rounds`` allowed switches, starting with ``base``."""
    current = base
    yield current
    for _ in range(rounds):
        nxt = {}
        for u in border:
            for v in border:
                best = current[u, v]
                for y in separator:
                    candidate = dist_add(current[u, y], base[y, v])
                    if candidate < best:
                        best = candidate
                nxt[u, v] = best
        yield nxt
        current = nxt


def _base_table(border, left, right, avoid=None):
    table = {}
    for u in border:
        for v in border:
            if u == v:
                table[u, v] = 0
            elif avoid is None:
                table[u, v] = min(left.d(u, v), right.d(u, v))
            else:
                table[u, v] = min(left.d_avoiding(u, v, avoid), right.d_avoiding(u, v, avoid))
    return table


def _check_inclusions(t, vid, left, right):
    s = t.nodes[vid]
    if not s <= (left.border & right.border):
        raise InclusionViolated(f'Separator of vertex {vid} is not inside both child borders.')
    if not t.border[vid] <= (left.border | right.border):
        raise InclusionViolated(f'Border of vertex {vid} is not covered by its child borders.')


def switch_rounds(t, vid, left, right, avoid=None, rounds=None):
    """Dense per-round distance tables over ``border(S)``; ``avoid`` removes one edge.

    ``rounds`` defaults to the separator size.
    """
    border = sorted(t.border[vid])
    separator = sorted(t.nodes[vid])
    if rounds is None:
        rounds = len(separator)
    base = _base_table(border, left, right, avoid)
    return list(_switch_tables(border, separator, base, rounds))


def _merged_rows(members, left, right):
    """Adjacency rows over ``members``: the cheaper child entry and its first edge."""
    rows, first = {}, {}
    for sol in (left, right):
        for (x, y), d in sorted(sol.dist.items()):
            if x not in members or y not in members:
                continue
            row = rows.setdefault(x, {})
            if d < row.get(y, INFINITY):
                row[y] = d
                first[x, y] = sol.e(x, y)
    return rows, first


def _closure(source, rows, switches, bound):
    """Dijkstra from ``source`` over ``rows``, continuing only through ``switches``.

    Returns ``(dist, hop, parent)`` where ``hop`` is the first node after the source.
    """
    dist, hop, parent = {source: 0}, {}, {}
    heap = [(0, source)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if x != source and x not in switches:
            continue
        for y, w in rows.get(x, {}).items():
            nd = d + w
            if nd >= bound or nd >= dist.get(y, INFINITY):
                continue
            dist[y] = nd
            hop[y] = y if x == source else hop[x]
            parent[y] = x
            heapq.heappush(heap, (nd, y))
    return dist, hop, parent


def _overrides_by_edge(sol, members):
    pairs = {}
    for x, y, e in sol.dist_avoiding:
        if x in members and y in members:
            pairs.setdefault(e, []).append((x, y))
    return pairs


def _patched(rows, changed):
    patched = dict(rows)
    copied = set()
    for (x, y), value in changed.items():
        if x not in copied:
            patched[x] = dict(patched.get(x, {}))
            copied.add(x)
        if value is INFINITY:
            patched[x].pop(y, None)
        else:
            patched[x][y] = value
    return patched


def merge_children(g, t, vid, left, right, bound=INFINITY):
    """Border solution of a nonleaf vertex from the solutions of its two children.

    Paths change sides only at labels both children share, so every border
    label runs Dijkstra over the children's tables continuing through those
    labels alone.  An avoided edge reruns only the sources whose search tree
    used a table entry it changes.
    """
    _check_inclusions(t, vid, left, right)
    border = sorted(t.border[vid])
    shared = left.border & right.border
    members = t.border[vid] | shared
    switches = t.nodes[vid] | shared
    rows, row_first = _merged_rows(members, left, right)

    dist, first, users = {}, {}, {}
    for u in border:
        reached, hop, parent = _closure(u, rows, switches, bound)
        for v in border:
            if v != u and v in reached:
                dist[u, v] = reached[v]
                first[u, v] = row_first[u, hop[v]]
        for y, x in parent.items():
            users.setdefault((x, y), set()).add(u)

    avoided = border_edges(g, t.border[vid], t.below[vid])
    overrides = [_overrides_by_edge(sol, members) for sol in (left, right)]
    avoiding = {}
    for e in sorted(avoided):
        changed = {}
        for pairs in overrides:
            for x, y in pairs.get(e, ()):
                value = min(left.d_avoiding(x, y, e), right.d_avoiding(x, y, e))
                if value != rows.get(x, {}).get(y, INFINITY):
                    changed[x, y] = value
        sources = set()
        for pair in changed:
            sources |= users.get(pair, set())
        if not sources:
            continue
        patched = _patched(rows, changed)
        for u in sorted(sources):
            reached = _closure(u, patched, switches, bound)[0]
            for v in border:
                if v != u:
                    avoiding[u, v, e] = reached.get(v, INFINITY)
    return BorderSolution.build(t.border[vid], dist, first, avoiding, avoided)


def is_special(t, vid, r, threshold):
    return len(t.border[vid]) + r <= threshold


def solve_border_problems(
    g, t, r, policy=None, lt=None, keep=None, inner=False, bound=INFINITY, special=None
):
    """Bottom-up solutions for every vertex of ``t``; ``keep`` filters what is retained.

    Entries at or above ``bound`` are dropped everywhere.  ``special`` holds
    solutions already computed for special leaves; without it they are found
    here.  With ``inner`` set, leaves go to the lookup table whenever it
    accepts them and are never treated as special again.
    """
    policy = policy or EllPolicy()
    if special is None:
        special = {} if inner or lt is None else solve_special_leaves(g, t, r, policy, lt, bound)
    solutions = {}
    retained = {}
    looked_up = 0
    for vid in t.postorder():
        if t.is_leaf(vid):
            if vid in special:
                solutions[vid] = special[vid]
            elif inner and lt is not None:
                h = induced_subgraph(g, sorted(t.nodes[vid]))
                if lt.accepts(h):
                    solutions[vid] = lt.border(h, t.border[vid], bound)
                    looked_up += 1
                else:
                    solutions[vid] = border_tables(h, t.border[vid], bound)
            else:
                solutions[vid] = solve_leaf_border(g, t, vid, bound)
        else:
            left, right = t.left[vid], t.right[vid]
            solutions[vid] = merge_children(g, t, vid, solutions[left], solutions[right], bound)
            for child in (left, right):
                if keep is None or keep(child):
                    retained[child] = solutions[child]
                del solutions[child]
    retained.update(solutions)
    logger.debug(
        'border problems solved',
        extra={'vertices': len(t), 'special': len(special), 'looked_up': looked_up, 'bound': bound},
    )
    return retained


def solve_special_leaf(g, t, vid, r, policy, lt, bound=INFINITY):
    """Answer a special leaf by an inner dissection whose every vertex carries the border."""
    from .dissection import build_dissection

    border = t.border[vid]
    h = induced_subgraph(g, sorted(t.nodes[vid]))
    if lt.accepts(h):
        return lt.border(h, border, bound)
    r_inner = r + len(border)
    tree = build_dissection(h, r_inner, policy).with_extra(border)
    if len(tree) == 1:
        return border_tables(h, border, bound)
    solutions = solve_border_problems(
        h, tree, r_inner, policy, lt, keep=lambda v: False, inner=True, bound=bound
    )
    return solutions[tree.root].restricted(border)


def solve_special_leaves(g, t, r, policy, lt, bound=INFINITY):
    """Solutions of the leaves whose border plus radius is under the special threshold."""
    threshold = policy.special_threshold(g.n)
    return {
        vid: solve_special_leaf(g, t, vid, r, policy, lt, bound)
        for vid in t.leaves()
        if is_special(t, vid, r, threshold)
    }


def solve_nonleaf_problem(g, t, r, policy=None, lt=None, bound=INFINITY):
    """Border solutions for every nonleaf vertex of ``t``, keeping entries below ``bound``."""
    solutions = solve_border_problems(
        g, t, r, policy, lt, keep=lambda v: not t.is_leaf(v), bound=bound
    )
    return {vid: sol for vid, sol in solutions.items() if not t.is_leaf(vid)}


def nonleaf_minimum(t, solutions):
    """min over nonleaf S and distinct u, v in S of d_S(u,v) + d_S(u,v; e_S(u,v)).

    Returns ``(value, (vertex, u, v))``; the second item is None when nothing is finite.
    """
    best, where = INFINITY, None
    for vid in sorted(solutions):
        if t.is_leaf(vid):
            continue
        sol = solutions[vid]
        separator = sorted(t.nodes[vid])
        for u in separator:
            for v in separator:
                if u == v:
                    continue
                candidate = sol.cycle_candidate(u, v)
                if candidate < best:
                    best, where = candidate, (vid, u, v)
    return best, where
