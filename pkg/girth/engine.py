"""Top-level girth computation and witness extraction."""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import networkx as nx

from graphs.distance import INFINITY, dist_to_json, is_finite
from graphs.exceptions import InvariantViolation, NoWitness
from graphs.oracle import brute_girth, shortest_cycle, shortest_cycle_through, verify_cycle
from graphs.planegraph import biconnected_components, embed, induced_subgraph, outerplane_depths

from .border_dp import nonleaf_minimum, solve_nonleaf_problem
from .conf import GirthConfig
from .dissection import build_dissection
from .leaf_lookup import EAGER_MAX_NODES, EAGER_MAX_WEIGHT, build_lookup, leaf_cycle, solve_leaf_problem
from .preprocess import NodeMap, ShortcutGirth, expand_with_map, normalize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Trace:
    """Which part of the computation produced the minimum."""

    kind: str
    block: int = None
    vertex: int = None
    u: object = None
    v: object = None

    def as_dict(self):
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass
class BlockOutcome:
    girth: object
    trace: Trace
    graph: object = None
    node_map: NodeMap = None
    tree: object = None
    solutions: dict = None
    stats: dict = field(default_factory=dict)


@dataclass
class GirthResult:
    girth: object
    witness_node: object = None
    witness_cycle: list = None
    trace: Trace = None
    stats: dict = field(default_factory=dict)
    outcome: BlockOutcome = field(default=None, repr=False, compare=False)
    node_map: NodeMap = field(default=None, repr=False, compare=False)

    def to_json(self):
        return {
            'girth': dist_to_json(self.girth),
            'witness': self.witness_cycle,
            'witness_node': self.witness_node,
            'trace': self.trace.as_dict() if self.trace else None,
            'stats': self.stats,
        }


def lookup_for(config, g0):
    """Fresh lookup table sized for ``g0`` under ``config``."""
    if config.lookup_mode == 'eager':
        return build_lookup(EAGER_MAX_NODES, EAGER_MAX_WEIGHT, 'eager')
    return build_lookup(1, max(1, g0.max_weight), 'lazy', config.lookup_max_nodes)


def combine(g, t, nonleaf_sol, leaf_min):
    """girth from the leaf minimum and the nonleaf border solutions."""
    return min(leaf_min, nonleaf_minimum(t, nonleaf_sol)[0])


def solve_block(block, index, config, lt):
    """Girth of one unit-weight biconnected block with its trace.

    The leaf problem runs first; the nonleaf tables then keep only entries
    lighter than the leaf answer.
    """
    normalized = normalize(block)
    if isinstance(normalized, ShortcutGirth):
        return BlockOutcome(
            normalized.girth, Trace('shortcut', index), normalized.graph, normalized.node_map,
            stats=normalized.stats,
        )
    g = normalized.graph
    r = outerplane_depths(g).radius
    t = build_dissection(g, r, config.ell)
    leaf_value, leaf = solve_leaf_problem(g, t, lt, r, config.ell)
    solutions = solve_nonleaf_problem(g, t, r, config.ell, lt, bound=leaf_value)
    nonleaf_value, where = nonleaf_minimum(t, solutions)
    stats = dict(normalized.stats, radius=r, tree_vertices=len(t), tree_height=t.height)
    if nonleaf_value < leaf_value:
        vid, u, v = where
        trace = Trace('nonleaf', index, vid, u, v)
    else:
        trace = Trace('leaf', index, leaf)
    value = combine(g, t, solutions, leaf_value)
    logger.debug('block solved', extra={'block': index, 'girth': value, 'via': trace.kind})
    return BlockOutcome(value, trace, g, normalized.node_map, t, solutions, stats)


def oracle_girth(g0, config, started=None):
    """Answer from the exact oracle alone; nothing is normalized or dissected."""
    started = time.perf_counter() if started is None else started
    weight, cycle = shortest_cycle(g0)
    trace = Trace('oracle') if cycle is not None else Trace('acyclic')
    stats = {
        'n': g0.n,
        'm': g0.m,
        'oracle': True,
        'millis': round((time.perf_counter() - started) * 1000, 3),
    }
    result = GirthResult(weight, trace=trace, stats=stats)
    if cycle is not None:
        result.witness_node = cycle[0]
        if config.witness:
            result.witness_cycle = list(cycle)
    logger.info(
        'girth computed',
        extra={'girth': dist_to_json(weight), 'oracle': True, 'millis': stats['millis']},
    )
    return result


def compute_girth(g0, config=None, lt=None):
    """Exact girth of a planar graph with nonnegative integer weights."""
    config = config or GirthConfig.from_settings()
    started = time.perf_counter()
    if not g0.is_embedded:
        g0 = embed(g0)
    if config.oracle:
        return oracle_girth(g0, config, started)
    if lt is None:
        lt = lookup_for(config, g0)

    if g0.is_unit_weighted:
        expanded, expand_map, candidate = g0, NodeMap(), INFINITY
    else:
        expanded, expand_map, candidate = expand_with_map(g0)
    blocks = [b for b in biconnected_components(expanded) if b.n >= 3]
    best, best_outcome = candidate, None
    trace = Trace('collapse') if is_finite(candidate) else Trace('acyclic')

    if config.threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(lambda item: solve_block(item[1], item[0], config, lt), enumerate(blocks)))
    else:
        outcomes = [solve_block(block, i, config, lt) for i, block in enumerate(blocks)]
    for outcome in outcomes:
        if outcome.girth < best:
            best, best_outcome, trace = outcome.girth, outcome, outcome.trace

    node_map = None
    if best_outcome is not None:
        node_map = best_outcome.node_map.then(expand_map)
    stats = {
        'n': g0.n,
        'm': g0.m,
        'expanded_nodes': expanded.n,
        'blocks': len(blocks),
        'lookup_hits': lt.hits,
        'lookup_misses': lt.misses,
        'ell': str(config.ell),
        'millis': round((time.perf_counter() - started) * 1000, 3),
    }
    if best_outcome is not None:
        stats['block'] = best_outcome.stats
    result = GirthResult(best, trace=trace, stats=stats, outcome=best_outcome, node_map=node_map)
    if config.cross_check:
        expected = brute_girth(g0)
        if expected != best:
            raise InvariantViolation(f'computed girth {best} but the oracle says {expected}')
    if is_finite(best):
        walk = _closed_walk(result)
        result.witness_node = _first_original(walk, node_map) if walk else None
        if result.witness_node is None and expand_map.merged:
            result.witness_node = min(min(members) for members in expand_map.merged.values())
        if config.witness:
            result = witness_cycle(g0, result, expand_map)
    logger.info(
        'girth computed',
        extra={
            'girth': dist_to_json(best),
            'blocks': len(blocks),
            'trace': trace.kind,
            'millis': stats['millis'],
        },
    )
    return result


def _first_original(walk, node_map):
    for label in walk:
        origin = node_map.original(label)
        if origin is not None:
            return origin
    return None


def _closed_walk(result):
    """Closed walk in the normalized block behind the trace, or None."""
    outcome = result.outcome
    if outcome is None:
        return None
    trace = outcome.trace
    g = outcome.graph
    if trace.kind == 'shortcut':
        return shortest_cycle(g)[1]
    if trace.kind == 'leaf':
        return leaf_cycle(g, outcome.tree.nodes[trace.vertex])
    sol = outcome.solutions[trace.vertex]
    u, v = trace.u, trace.v
    e = sol.e(u, v)
    x = e[1] if e[0] == u else e[0]
    graph = induced_subgraph(g, sorted(outcome.tree.below[trace.vertex])).to_networkx()
    graph.remove_edge(u, x)
    try:
        there = nx.dijkstra_path(graph, x, v, weight='weight')
        back = nx.dijkstra_path(graph, v, u, weight='weight')
    except nx.NetworkXNoPath:
        return None
    return [u] + there + back[1:-1]


def original_walk(result, maps=None):
    """The trace's closed walk in input labels, contracted chains put back."""
    walk = _closed_walk(result)
    if not walk or result.outcome is None:
        return None
    walk = result.outcome.node_map.expand_walk(walk)
    if maps is not None:
        walk = maps.expand_walk(walk)
    return walk


def _repair(g0, walk, maps=None):
    """Join consecutive walk nodes that are not adjacent in ``g0``.

    Such nodes stand for zero-weight groups; the join runs inside the two
    groups, so it costs exactly the lightest edge between them.
    """
    graph = g0.to_networkx()
    groups = {}
    if maps is not None:
        for members in maps.merged.values():
            for label in members:
                groups[label] = members
    repaired = []
    for a, b in zip(walk, walk[1:] + walk[:1]):
        repaired.append(a)
        if a != b and g0.label_weight(a, b) is INFINITY:
            inside = set(groups.get(a, (a,))) | set(groups.get(b, (b,)))
            try:
                path = nx.dijkstra_path(graph.subgraph(inside), a, b, weight='weight')
            except nx.NetworkXNoPath:
                return None
            repaired.extend(path[1:-1])
    return repaired


def simple_cycles_of(walk):
    """Split a closed walk at repeated nodes; backtracks of length two are dropped."""
    cycles = []
    path, position = [], {}
    for label in walk + walk[:1]:
        if label in position:
            start = position[label]
            cycle = path[start:]
            for dropped in cycle[1:]:
                del position[dropped]
            del path[start + 1:]
            if len(cycle) >= 3:
                cycles.append(cycle)
            continue
        position[label] = len(path)
        path.append(label)
    return cycles


def witness_cycle(g0, result, maps=None):
    """Attach a simple min-weight cycle of ``g0`` to ``result``.

    The trace's walk is mapped back through every transform.  A cycle that
    collapsed during expansion, or whose walk runs through a zero-weight
    group, is looked for among that group's members instead.
    """
    if not is_finite(result.girth):
        raise NoWitness('The graph is acyclic; there is no cycle to report.')
    girth = result.girth
    best = None
    groups = ()
    if result.outcome is None:
        groups = list(maps.merged) if maps is not None else []
    else:
        walk = original_walk(result, maps)
        repaired = _repair(g0, walk, maps) if walk and len(walk) >= 3 else None
        for cycle in simple_cycles_of(repaired or []):
            check = verify_cycle(g0, cycle)
            if check.simple and (best is None or check.weight < best[0]):
                best = (check.weight, cycle)
        if (best is None or best[0] != girth) and maps is not None:
            groups = [label for label in walk or () if label in maps.merged]
    if (best is None or best[0] != girth) and groups:
        best = _search_witness(g0, girth, [maps.merged[label] for label in groups])
    if best is None or best[0] != girth:
        raise InvariantViolation(
            f'no witness of weight {girth} behind the {result.trace.kind} trace'
        )
    cycle = best[1]
    check = verify_cycle(g0, cycle)
    if not check.simple or check.weight != girth:
        raise InvariantViolation(f'witness {cycle} weighs {check.weight}, girth is {girth}')
    return replace(result, witness_cycle=cycle, witness_node=cycle[0])


def _search_witness(g0, girth, groups):
    """Min-weight cycle through a member of one of the zero-weight ``groups``."""
    for members in groups:
        for label in sorted(members):
            weight, cycle = shortest_cycle_through(g0, label, girth)
            if weight == girth and cycle is not None:
                return weight, cycle
    return None
