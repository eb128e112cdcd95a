import math
from fractions import Fraction

import networkx as nx
from django.test import SimpleTestCase
from hypothesis import given

from graphs import generator
from graphs.distance import INFINITY
from graphs.exceptions import (
    BadParameter,
    DegreeTooSmall,
    NotBiconnected,
    NotMinDepthNeighbor,
    NotNeighbor,
    PreconditionViolated,
    ZeroCycleCollapse,
)
from graphs.oracle import brute_girth
from graphs.planegraph import PlaneGraph, biconnected_components, outerplane_depths

from girth.preprocess import (
    SLICE_FACTOR,
    NodeMap,
    ShortcutGirth,
    contract,
    contract_with_map,
    density,
    expand,
    expand_with_map,
    is_contracted,
    min_depth_neighbor,
    normalize,
    reduce_degree,
    round_weights,
    slice_outerplane,
)

from .strategies import SLOW, planar_graphs, triangulations


class DensityTests(SimpleTestCase):
    def test_fixture_densities(self):
        """The two small fixtures have densities 3/2 and 9/5."""
        self.assertEqual(density(generator.figure_fixture('1a')), Fraction(3, 2))
        self.assertEqual(density(generator.figure_fixture('1c')), Fraction(9, 5))

    def test_unit_graph_has_density_one(self):
        """Unit weights leave the node count unchanged."""
        self.assertEqual(density(generator.grid(4, 4)), 1)


class ExpandTests(SimpleTestCase):
    def test_fixture_expansion(self):
        """The first fixture expands to nine unit-weight nodes."""
        g = expand(generator.figure_fixture('1a'))
        self.assertEqual(g.n, 9)
        self.assertTrue(g.is_unit_weighted)
        self.assertEqual(brute_girth(g), 4)

    def test_zero_weight_cycle_collapses(self):
        """A zero-weight cycle folds into a loop and is reported."""
        g = generator.cycle(3, weight=0)
        with self.assertRaises(ZeroCycleCollapse) as ctx:
            expand(g)
        self.assertEqual(ctx.exception.candidate, 0)
        _, _, candidate = expand_with_map(g)
        self.assertEqual(candidate, 0)

    def test_merged_nodes_are_recorded(self):
        """Contracted zero-weight edges list their original members."""
        _, node_map, _ = expand_with_map(generator.figure_fixture('1a'))
        self.assertEqual(node_map.merged, {2: (2, 3)})
        self.assertEqual(node_map.members(2), (2, 3))

    @SLOW
    @given(planar_graphs(max_nodes=25, wmax=4, zero=True))
    def test_node_count_formula(self, g):
        """|V(expand(g))| = w(g) - |E(g)| + |V(g)|."""
        expanded, _, _ = expand_with_map(g)
        self.assertEqual(expanded.n, g.total_weight - g.m + g.n)

    @SLOW
    @given(planar_graphs(max_nodes=20, wmax=4, zero=True))
    def test_girth_survives_expansion(self, g):
        """The expansion plus the collapse candidate keep the girth."""
        expanded, _, candidate = expand_with_map(g)
        self.assertEqual(min(brute_girth(expanded), candidate), brute_girth(g))


class NodeMapTests(SimpleTestCase):
    def test_composition(self):
        """then() maps through both stages; synthetic labels stay None."""
        later = NodeMap({10: 4, 11: None})
        earlier = NodeMap({4: 1}, {1: (1, 2)})
        both = later.then(earlier)
        self.assertEqual(both.original(10), 1)
        self.assertIsNone(both.original(11))
        self.assertEqual(both.members(10), (1, 2))
        self.assertEqual(both.original(3), 3)


class RoundTests(SimpleTestCase):
    def test_round_caps_weights(self):
        """Weights above the threshold are lowered to it."""
        g = round_weights(generator.figure_fixture('3a'), 3)
        self.assertEqual(g.max_weight, 3)

    def test_threshold_must_be_positive(self):
        """A zero threshold is rejected."""
        with self.assertRaises(BadParameter):
            round_weights(generator.cycle(3), 0)

    @SLOW
    @given(planar_graphs(min_nodes=3, max_nodes=25, wmax=8))
    def test_rounding_at_girth_keeps_girth(self, g):
        """Rounding at the girth changes neither girth nor raises density."""
        girth = brute_girth(g)
        if girth is INFINITY:
            return
        rounded = round_weights(g, girth)
        self.assertEqual(brute_girth(rounded), girth)
        self.assertLessEqual(density(rounded), density(g))


class ContractTests(SimpleTestCase):
    def test_cycle_contracts_to_triangle(self):
        """C_8 keeps three nodes whose weights sum to eight."""
        g = contract(generator.cycle(8))
        self.assertEqual(g.n, 3)
        self.assertEqual(g.total_weight, 8)
        self.assertTrue(is_contracted(g))

    def test_needs_biconnected(self):
        """A path is rejected."""
        path = PlaneGraph([1, 2, 3], [(0, 1, 1), (1, 2, 1)])
        with self.assertRaises(NotBiconnected):
            contract(path)

    def test_grid_expands_back(self):
        """expand(contract(g)) is isomorphic to a unit grid."""
        g = generator.grid(3, 5)
        again = expand(contract(g))
        self.assertTrue(nx.is_isomorphic(again.to_networkx(), g.to_networkx()))

    @SLOW
    @given(planar_graphs(min_nodes=3, max_nodes=30))
    def test_random_blocks_expand_back(self, g):
        """expand(contract(b)) is isomorphic to every biconnected block b."""
        for block in biconnected_components(g):
            if block.n < 3:
                continue
            again = expand(contract(block))
            self.assertTrue(nx.is_isomorphic(again.to_networkx(), block.to_networkx()))
            self.assertEqual(again.n, block.n)

    def test_chains_put_the_cycle_back(self):
        """The contracted C_8 records its suppressed labels and walks expand to all eight."""
        original = generator.cycle(8)
        g, node_map = contract_with_map(original)
        for (a, b), chain in node_map.chains.items():
            self.assertLess(a, b)
            path = [a, *chain, b]
            for x, y in zip(path, path[1:]):
                self.assertIsNot(original.label_weight(x, y), INFINITY)
        walk = node_map.expand_walk(list(g.labels))
        self.assertEqual(sorted(walk), list(range(1, 9)))
        for x, y in zip(walk, walk[1:] + walk[:1]):
            self.assertIsNot(original.label_weight(x, y), INFINITY)

    @SLOW
    @given(triangulations(max_nodes=20))
    def test_girth_bound_on_contracted_graphs(self, g):
        """girth <= 36 * density on contracted positive-weight blocks."""
        c = contract(generator.random_weights(g, 5, g.m))
        self.assertLessEqual(brute_girth(c), SLICE_FACTOR * density(c))


class ReduceDegreeTests(SimpleTestCase):
    def setUp(self):
        self.grid = generator.grid(4, 4)

    def test_splits_into_zero_weight_path(self):
        """Node 6 becomes four nodes joined by zero-weight edges."""
        g = reduce_degree(self.grid, 6, 2)
        self.assertEqual(g.n, self.grid.n + 3)
        self.assertEqual(sum(1 for e in g.edges if e.weight == 0), 3)
        again = expand(g)
        self.assertTrue(nx.is_isomorphic(again.to_networkx(), self.grid.to_networkx()))
        self.assertEqual(outerplane_depths(g).radius, outerplane_depths(self.grid).radius)

    def test_degree_too_small(self):
        """Corner nodes have degree two."""
        with self.assertRaises(DegreeTooSmall):
            reduce_degree(self.grid, 1, 2)

    def test_not_a_neighbor(self):
        """The start must be adjacent."""
        with self.assertRaises(NotNeighbor):
            reduce_degree(self.grid, 6, 16)

    def test_start_must_be_shallowest(self):
        """An interior neighbour is deeper than a boundary one."""
        with self.assertRaises(NotMinDepthNeighbor):
            reduce_degree(self.grid, 6, 7)

    @SLOW
    @given(triangulations(min_nodes=6, max_nodes=25))
    def test_random_split_keeps_girth(self, g):
        """Splitting a node at its shallowest neighbour keeps the girth."""
        depths = outerplane_depths(g)
        candidates = [v for v in range(g.n) if g.degree(v) >= 4]
        if not candidates:
            return
        v = candidates[0]
        u = min_depth_neighbor(g, v, depths)
        reduced = reduce_degree(g, g.labels[v], g.labels[u])
        expanded, _, candidate = expand_with_map(reduced)
        self.assertEqual(min(brute_girth(expanded), candidate), brute_girth(g))
        self.assertEqual(expanded.n, g.n)

    @SLOW
    @given(triangulations(min_nodes=6, max_nodes=30))
    def test_every_split_keeps_the_radius(self, g):
        """Splitting any degree-4 node at its chosen neighbour keeps the radius."""
        depths = outerplane_depths(g)
        for v in range(g.n):
            if g.degree(v) < 4:
                continue
            u = min_depth_neighbor(g, v, depths)
            reduced = reduce_degree(g, g.labels[v], g.labels[u], depths)
            self.assertEqual(outerplane_depths(reduced).radius, depths.radius)
            self.assertTrue(
                nx.is_isomorphic(expand(reduced).to_networkx(), expand(g).to_networkx())
            )


class NormalizeTests(SimpleTestCase):
    def test_slice_needs_positive_weights(self):
        """Slicing refuses zero weights."""
        g = generator.grid(3, 3).with_weights([0] + [1] * 11)
        with self.assertRaises(PreconditionViolated):
            slice_outerplane(g)

    def test_shallow_graph_is_not_sliced(self):
        """A graph thinner than two bands comes back unchanged."""
        g = generator.grid(4, 4)
        sliced, band_map = slice_outerplane(g)
        self.assertIs(sliced, g)
        self.assertEqual(set(band_map), set(g.labels))

    def test_long_cycle_takes_the_shortcut(self):
        """Long subdivided cycles are answered on the contracted graph."""
        result = normalize(generator.cycle(40))
        self.assertIsInstance(result, ShortcutGirth)
        self.assertEqual(result.girth, 40)

    def test_normalized_degrees(self):
        """After normalization no node has degree above three."""
        result = normalize(generator.random_planar(30, 1.0, 3))
        self.assertTrue(all(result.graph.degree(v) <= 3 for v in range(result.graph.n)))
        self.assertEqual(result.stats['bands'], 1)
        for label in result.graph.labels:
            self.assertIn(result.node_map.original(label), range(1, 31))

    @SLOW
    @given(triangulations(min_nodes=4, max_nodes=40))
    def test_weight_and_radius_bounds(self, g):
        """wmax stays under ceil(36 * density) and the radius under 108 * density."""
        result = normalize(g)
        if isinstance(result, ShortcutGirth):
            return
        d = Fraction(result.stats['density'])
        self.assertLessEqual(result.graph.max_weight, math.ceil(SLICE_FACTOR * d))
        self.assertLessEqual(outerplane_depths(result.graph).radius, 3 * SLICE_FACTOR * d)
        self.assertLessEqual(result.graph.max_weight, result.stats['wmax'])
        self.assertEqual(brute_girth(result.graph), brute_girth(g))
