"""Lookup table for small graphs, keyed by a canonical form, and the leaf problem."""
import itertools
import logging
import threading

from graphs.distance import INFINITY, dist_from_json, dist_to_json
from graphs.exceptions import TooLarge, WeightTooLarge
from graphs.oracle import brute_girth, shortest_cycle
from graphs.planegraph import PlaneGraph, induced_subgraph

from .border_dp import BorderSolution, DistanceOracle, border_edges, nonleaf_minimum, solve_nonleaf_problem
from .conf import EllPolicy
from .preprocess import density

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
EAGER_MAX_NODES = 4
EAGER_MAX_WEIGHT = 2


def _adjacency(h):
    adj = [[] for _ in range(h.n)]
    for u, v, w in h.edges:
        adj[u].append((v, w))
        adj[v].append((u, w))
    return adj


def _refine(adj, colours):
    """Weighted colour refinement; colours are renumbered by sorted signature."""
    count = len(set(colours))
    while True:
        signatures = [
            (colours[v], tuple(sorted((colours[x], w) for x, w in adj[v])))
            for v in range(len(adj))
        ]
        ranks = {sig: rank for rank, sig in enumerate(sorted(set(signatures)))}
        colours = [ranks[sig] for sig in signatures]
        if len(ranks) == count:
            return colours
        count = len(ranks)


def _encode(h, colours):
    position = colours
    edges = sorted(
        (min(position[u], position[v]), max(position[u], position[v]), w) for u, v, w in h.edges
    )
    return f'{h.n}|' + ';'.join(f'{a},{b},{w}' for a, b, w in edges)


def canonical_form(h):
    """``(key, order)``: an isomorphism-invariant key and the labels in canonical order."""
    adj = _adjacency(h)
    best = None
    stack = [_refine(adj, [0] * h.n)]
    while stack:
        colours = stack.pop()
        cells = {}
        for v, c in enumerate(colours):
            cells.setdefault(c, []).append(v)
        split = [cell for c, cell in sorted(cells.items()) if len(cell) > 1]
        if not split:
            key = _encode(h, colours)
            if best is None or key < best[0]:
                order = [None] * h.n
                for v, c in enumerate(colours):
                    order[c] = h.labels[v]
                best = (key, order)
            continue
        cell = min(split, key=len)
        for v in cell:
            individual = [2 * c + 1 for c in colours]
            individual[v] -= 1
            stack.append(_refine(adj, individual))
    if best is None:
        return '0|', []
    return best


def _tables(h):
    """Girth and all-pairs tables of a graph whose labels are ``0..n-1``."""
    oracle = DistanceOracle(h)
    n = h.n
    dist = [[oracle.distance(u, v) for v in range(n)] for u in range(n)]
    first = [[oracle.first_edge(u, v) if u != v else None for v in range(n)] for u in range(n)]
    avoid = {}
    for eid in range(h.m):
        e = h.edge_key(eid)
        oracle.set_weight(e, INFINITY)
        avoid[e] = [[oracle.distance(u, v) for v in range(n)] for u in range(n)]
        oracle.set_weight(e, h.weight(eid))
    return {'girth': brute_girth(h), 'dist': dist, 'first': first, 'avoid': avoid}


def _canonical_graph(h, order):
    position = {label: i for i, label in enumerate(order)}
    edges = []
    for u, v, w in h.edges:
        a, b = position[h.labels[u]], position[h.labels[v]]
        edges.append((min(a, b), max(a, b), w))
    return PlaneGraph(range(h.n), sorted(edges), validate=False)


def entry_to_json(entry):
    return {
        'girth': dist_to_json(entry['girth']),
        'dist': [[dist_to_json(d) for d in row] for row in entry['dist']],
        'first': [[list(e) if e else None for e in row] for row in entry['first']],
        'avoid': [
            [list(e), [[dist_to_json(d) for d in row] for row in table]]
            for e, table in sorted(entry['avoid'].items())
        ],
    }


def entry_from_json(payload):
    return {
        'girth': dist_from_json(payload['girth']),
        'dist': [[dist_from_json(d) for d in row] for row in payload['dist']],
        'first': [[tuple(e) if e else None for e in row] for row in payload['first']],
        'avoid': {
            tuple(e): [[dist_from_json(d) for d in row] for row in table]
            for e, table in payload['avoid']
        },
    }


class LookupTable:
    """Answers for graphs of at most ``k`` nodes and weights at most ``w``.

    ``lazy`` tables fill on demand and widen ``k``/``w`` up to ``max_nodes``;
    ``eager`` tables are enumerated up front and refuse anything larger.
    """

    def __init__(self, k, w, mode='lazy', max_nodes=16):
        self.k = k
        self.w = w
        self.mode = mode
        self.max_nodes = max(max_nodes, k)
        self.hits = 0
        self.misses = 0
        self._cache = {}
        self._fresh = set()
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._cache)

    def __repr__(self):
        return f'<LookupTable {self.mode} k={self.k} w={self.w} entries={len(self)}>'

    def accepts(self, h):
        if self.mode == 'eager':
            return h.n <= self.k and h.max_weight <= self.w
        return h.n <= self.max_nodes

    def _check(self, h):
        if self.mode == 'eager':
            if h.n > self.k:
                raise TooLarge(f'Graph has {h.n} nodes; the table covers k={self.k}.')
            if h.max_weight > self.w:
                raise WeightTooLarge(f'Weight {h.max_weight} exceeds the table bound w={self.w}.')
            return
        if h.n > self.max_nodes:
            raise TooLarge(f'Graph has {h.n} nodes; lazy lookups stop at {self.max_nodes}.')
        self.k = max(self.k, h.n)
        self.w = max(self.w, h.max_weight)

    def entry(self, h):
        """Cached tables for ``h`` plus the labels of ``h`` in canonical order."""
        self._check(h)
        key, order = canonical_form(h)
        cached = self._cache.get(key)
        if cached is not None:
            self.hits += 1
            return cached, order
        if self.mode == 'eager':
            raise TooLarge(f'Graph {key} is missing from the eager table.')
        computed = _tables(_canonical_graph(h, order))
        with self._lock:
            self.misses += 1
            self._cache[key] = computed
            self._fresh.add(key)
        return computed, order

    def girth(self, h):
        return self.entry(h)[0]['girth']

    def border(self, h, b, bound=INFINITY):
        """Border tables of ``h`` over the label set ``b``, translated from the cache.

        Entries at or above ``bound`` are dropped.
        """
        b = frozenset(b)
        entry, order = self.entry(h)
        position = {label: i for i, label in enumerate(order)}
        dist, first, avoiding = {}, {}, {}
        ordered = sorted(b)
        for u in ordered:
            for v in ordered:
                d = entry['dist'][position[u]][position[v]]
                if u != v and d < bound:
                    dist[u, v] = d
                    first[u, v] = _edge_label(entry['first'][position[u]][position[v]], order)
        avoided = border_edges(h, b, set(h.labels))
        for e in avoided:
            a, c = position[e[0]], position[e[1]]
            table = entry['avoid'][(min(a, c), max(a, c))]
            for u in ordered:
                for v in ordered:
                    d = table[position[u]][position[v]]
                    avoiding[u, v, e] = d if d < bound else INFINITY
        return BorderSolution.build(b, dist, first, avoiding, avoided)

    def fill(self):
        """Enumerate every graph on up to ``k`` nodes with weights ``0..w``."""
        if self.k > EAGER_MAX_NODES or self.w > EAGER_MAX_WEIGHT:
            raise TooLarge(
                f'Eager tables stop at k={EAGER_MAX_NODES}, w={EAGER_MAX_WEIGHT}; '
                f'got k={self.k}, w={self.w}.'
            )
        for n in range(1, self.k + 1):
            pairs = list(itertools.combinations(range(n), 2))
            for choice in itertools.product(range(-1, self.w + 1), repeat=len(pairs)):
                edges = [(u, v, w) for (u, v), w in zip(pairs, choice) if w >= 0]
                h = PlaneGraph(range(n), edges, validate=False)
                key, order = canonical_form(h)
                if key not in self._cache:
                    self._cache[key] = _tables(_canonical_graph(h, order))
        logger.info(
            'eager lookup table filled', extra={'k': self.k, 'w': self.w, 'entries': len(self)}
        )

    def items(self):
        return list(self._cache.items())

    def load(self, entries):
        with self._lock:
            for key, entry in entries:
                self._cache.setdefault(key, entry)

    def fresh(self):
        """Entries computed since the last call, for persisting."""
        with self._lock:
            keys, self._fresh = self._fresh, set()
        return [(key, self._cache[key]) for key in sorted(keys)]


def _edge_label(e, order):
    if e is None:
        return None
    a, b = order[e[0]], order[e[1]]
    return (a, b) if a < b else (b, a)


def build_lookup(k, w, mode='lazy', max_nodes=16):
    if k < 1 or w < 0:
        raise TooLarge(f'Lookup bounds must be positive, got k={k}, w={w}.')
    table = LookupTable(k, w, mode, max_nodes)
    if mode == 'eager':
        table.fill()
    return table


def lookup_border(lt, h, b, bound=INFINITY):
    return lt.border(h, b, bound)


def lookup_girth(lt, h):
    return lt.girth(h)


class LookupStore:
    """Database persistence for lookup entries through :class:`girth.models.LookupEntry`."""

    def load(self, table):
        from .models import LookupEntry

        rows = LookupEntry.objects.filter(format_version=FORMAT_VERSION).values_list('key', 'payload')
        table.load((key, entry_from_json(payload)) for key, payload in rows)
        logger.info('lookup entries loaded', extra={'entries': len(table)})

    def flush(self, table):
        from .models import LookupEntry

        fresh = table.fresh()
        LookupEntry.objects.bulk_create(
            [
                LookupEntry(
                    k=int(key.split('|', 1)[0]),
                    w=max(_weights(key), default=0),
                    format_version=FORMAT_VERSION,
                    key=key,
                    payload=entry_to_json(entry),
                )
                for key, entry in fresh
            ],
            ignore_conflicts=True,
        )
        logger.info('lookup entries stored', extra={'entries': len(fresh)})
        return len(fresh)


def _weights(key):
    body = key.split('|', 1)[1]
    return [int(edge.rsplit(',', 1)[1]) for edge in body.split(';') if edge]


def leaf_girth(g, labels, r, policy, lt, limit=INFINITY):
    """girth(G[labels]) by lookup, by an inner dissection, or by the exact oracle.

    Cycles at or above ``limit`` may be reported as INFINITY.
    """
    h = induced_subgraph(g, sorted(labels))
    if h.m < 3:
        return INFINITY
    if lt is not None and lt.accepts(h):
        return lt.girth(h)
    from .dissection import build_dissection

    inner = build_dissection(h, r, policy)
    if len(inner) == 1:
        return brute_girth(h, limit)
    best = limit
    for leaf in inner.leaves():
        sub = induced_subgraph(h, sorted(inner.nodes[leaf]))
        if lt is not None and lt.accepts(sub):
            value = lt.girth(sub)
        else:
            value = brute_girth(sub, best)
        best = min(best, value)
    solutions = solve_nonleaf_problem(h, inner, r, policy, lt, bound=best)
    best = min(best, nonleaf_minimum(inner, solutions)[0])
    return best if best < limit else INFINITY


def solve_leaf_problem(g, t, lt, r=0, policy=None):
    """min over leaves L of girth(G[L]) as ``(value, leaf vertex)``.

    Each leaf only looks for cycles lighter than the best found so far.
    Dense graphs go straight to the exact oracle per leaf.
    """
    policy = policy or EllPolicy()
    dense = density(g) >= policy.special_threshold(g.n)
    best, where = INFINITY, None
    for vid in t.leaves():
        if dense:
            value = brute_girth(induced_subgraph(g, sorted(t.nodes[vid])), best)
        else:
            value = leaf_girth(g, t.nodes[vid], r, policy, lt, best)
        if value < best:
            best, where = value, vid
    logger.debug(
        'leaf problem solved', extra={'leaves': len(t.leaves()), 'dense': dense, 'minimum': best}
    )
    return best, where


def leaf_cycle(g, labels):
    """A min-weight cycle of G[labels] as labels, or None."""
    return shortest_cycle(induced_subgraph(g, sorted(labels)))[1]
