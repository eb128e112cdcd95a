from django.test import SimpleTestCase
from hypothesis import given
from hypothesis import strategies as st

from graphs import generator
from graphs.distance import INFINITY, dist_add, dist_from_json, dist_to_json
from graphs.exceptions import (
    GraphError,
    NegativeWeight,
    NonSimple,
    NotEmbedded,
    NotPlanar,
    ParseError,
    UnknownEdge,
    UnknownNode,
)
from graphs.oracle import brute_girth
from graphs.parsing import parse_graph, write_graph
from graphs.planegraph import (
    PlaneGraph,
    biconnected_components,
    embed,
    induced_subgraph,
    outerplane_depths,
)

from .strategies import SLOW, planar_graphs

TRIANGLE = 'p planar 3 3\ne 1 2 1\ne 2 3 1\ne 3 1 1\n'


class DistanceTests(SimpleTestCase):
    def test_infinity_saturates(self):
        """Adding anything to INFINITY stays INFINITY."""
        self.assertIs(dist_add(3, INFINITY, 4), INFINITY)
        self.assertEqual(dist_add(3, 4), 7)
        self.assertTrue(INFINITY > 10 ** 12)
        self.assertFalse(INFINITY < 0)

    def test_json_form(self):
        """INFINITY serialises as the string inf."""
        self.assertEqual(dist_to_json(INFINITY), 'inf')
        self.assertIs(dist_from_json('inf'), INFINITY)
        self.assertEqual(dist_from_json(5), 5)


class ParsingTests(SimpleTestCase):
    def test_triangle_without_rotation_is_embedded(self):
        """Plain edge lists get a planar rotation system."""
        g = parse_graph(TRIANGLE)
        self.assertTrue(g.is_embedded)
        self.assertEqual((g.n, g.m), (3, 3))
        self.assertEqual(len(g.faces()), 2)

    def test_written_graph_parses_back(self):
        """write_graph output reads back with the same edges and rotation."""
        g = generator.figure_fixture('1a')
        again = parse_graph(write_graph(g))
        self.assertEqual(again.edges, g.edges)
        self.assertEqual(again.rotation, g.rotation)

    def test_same_seed_same_bytes(self):
        """Generation is deterministic per seed."""
        first = write_graph(generator.random_planar(40, 0.3, 7))
        second = write_graph(generator.random_planar(40, 0.3, 7))
        self.assertEqual(first, second)

    def test_parse_error_names_the_line(self):
        """Unknown line kinds report their line number."""
        with self.assertRaises(ParseError) as ctx:
            parse_graph('p planar 2 1\nx 1 2\n')
        self.assertEqual(ctx.exception.line_number, 2)

    def test_invalid_utf8_is_a_parse_error(self):
        """Undecodable bytes name the line they sit on."""
        with self.assertRaises(ParseError) as ctx:
            parse_graph(b'p planar 3 3\ne 1 2 1\ne 2 3 1\ne 1 3 \xff\n')
        self.assertEqual(ctx.exception.line_number, 4)
        self.assertEqual(parse_graph(TRIANGLE.encode()).m, 3)

    def test_missing_header(self):
        """Data before the header is rejected."""
        with self.assertRaises(ParseError):
            parse_graph('e 1 2 1\n')

    def test_edge_count_mismatch(self):
        """The header edge count must match the edge lines."""
        with self.assertRaises(ParseError):
            parse_graph('p planar 3 2\ne 1 2 1\n')

    def test_self_loop(self):
        """Self-loops are not simple."""
        with self.assertRaises(NonSimple):
            parse_graph('p planar 2 1\ne 1 1 1\n')

    def test_parallel_edge(self):
        """Parallel edges are not simple."""
        with self.assertRaises(NonSimple):
            parse_graph('p planar 2 2\ne 1 2 1\ne 2 1 3\n')

    def test_negative_weight(self):
        """Weights must be nonnegative."""
        with self.assertRaises(NegativeWeight):
            parse_graph('p planar 2 1\ne 1 2 -1\n')

    def test_k5_is_not_planar(self):
        """K5 fails the planarity test."""
        edges = [(u, v, 1) for u in range(5) for v in range(u + 1, 5)]
        with self.assertRaises(NotPlanar):
            embed(PlaneGraph(range(1, 6), edges))

    def test_bad_rotation_fails_euler(self):
        """A rotation that is not planar is rejected."""
        edges = [(u, v, 1) for u in range(4) for v in range(u + 1, 4)]
        g = embed(PlaneGraph(range(1, 5), edges))
        rotation = [list(r) for r in g.rotation]
        rotation[0] = rotation[0][::-1]
        with self.assertRaises(NotPlanar):
            PlaneGraph(g.labels, g.edges, rotation)

    def test_errors_are_graph_errors(self):
        """Every input failure shares the GraphError base."""
        for error in (ParseError('x'), NonSimple('x'), NotPlanar('x'), UnknownEdge('x')):
            self.assertIsInstance(error, GraphError)


class PlaneGraphTests(SimpleTestCase):
    def test_edge_keys_are_label_pairs(self):
        """Edges are addressed by sorted label pairs."""
        g = generator.figure_fixture('3a')
        eid = g.edge_by_key((7, 8))
        self.assertEqual(g.edge_key(eid), (7, 8))
        self.assertEqual(g.label_weight(8, 7), 2)
        self.assertIs(g.label_weight(1, 12), INFINITY)
        with self.assertRaises(UnknownEdge):
            g.edge_by_key((1, 12))

    def test_unknown_node(self):
        """Asking for a missing label raises UnknownNode."""
        with self.assertRaises(UnknownNode):
            generator.cycle(4).neighbor_labels(99)

    def test_faces_need_rotation(self):
        """Faces need an embedding."""
        with self.assertRaises(NotEmbedded):
            generator.cycle(4).without_rotation().faces()

    def test_grid_faces(self):
        """A 3x3 grid has four squares and one outer face."""
        g = generator.grid(3, 3)
        sizes = sorted(len(face) for face in g.faces())
        self.assertEqual(sizes, [4, 4, 4, 4, 8])
        self.assertEqual(len(g.outer_faces()[0]), 8)

    def test_induced_subgraph_keeps_labels(self):
        """Induced subgraphs keep labels, weights and a valid rotation."""
        g = generator.figure_fixture('3a')
        h = induced_subgraph(g, [2, 3, 4, 7, 8, 10, 11, 12])
        self.assertEqual(h.labels, (2, 3, 4, 7, 8, 10, 11, 12))
        self.assertEqual(h.label_weight(7, 11), 10)
        h.check()

    def test_blocks_of_two_triangles_sharing_a_node(self):
        """A bowtie splits into its two triangles."""
        edges = [(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1), (3, 4, 1), (4, 2, 1)]
        blocks = biconnected_components(PlaneGraph(range(1, 6), edges))
        self.assertEqual([sorted(b.labels) for b in blocks], [[1, 2, 3], [3, 4, 5]])

    @SLOW
    @given(planar_graphs(max_nodes=40))
    def test_random_graphs_satisfy_euler(self, g):
        """Generated rotation systems pass the Euler check."""
        self.assertTrue(g.euler_ok())


class DepthTests(SimpleTestCase):
    def test_fixture_internal_node(self):
        """Node d of the first fixture is its only depth-2 node."""
        g = generator.figure_fixture('1a')
        depths = outerplane_depths(g)
        self.assertEqual(depths.of(5, g), 2)
        self.assertEqual(depths.radius, 2)
        self.assertEqual([label for label, d in depths.as_labels().items() if d == 2], [5])

    def test_wheel_hub_is_deeper(self):
        """The hub of a wheel sits one level inside the rim."""
        g = generator.wheel(6)
        depths = outerplane_depths(g)
        self.assertEqual(depths.of(1, g), 2)
        self.assertEqual(depths.radius, 2)

    def test_grid_radius(self):
        """A 5x5 grid peels into three levels."""
        self.assertEqual(outerplane_depths(generator.grid(5, 5)).radius, 3)

    def test_isolated_nodes_are_outer(self):
        """Isolated nodes have depth 1."""
        g = PlaneGraph([1, 2, 3], [(0, 1, 1)], [[0], [0], []])
        self.assertEqual(outerplane_depths(g).depth, (1, 1, 1))

    def test_outerplanar_graphs_stay_at_depth_one(self):
        """Re-embedding a 1-outerplanar graph keeps every node at depth 1."""
        rim = induced_subgraph(generator.wheel(6), range(2, 8))
        for g in (generator.cycle(7), rim):
            first = outerplane_depths(g)
            again = outerplane_depths(embed(PlaneGraph(g.labels, g.edges)))
            self.assertEqual(first.depth, (1,) * g.n)
            self.assertEqual(again.depth, first.depth)
            self.assertEqual(outerplane_depths(g).depth, first.depth)


class SubgraphTests(SimpleTestCase):
    @SLOW
    @given(planar_graphs(min_nodes=2, max_nodes=30), st.randoms())
    def test_restriction_composes(self, g, rng):
        """G[A][B] is G[B] whenever B lies inside A."""
        outer = rng.sample(list(g.labels), rng.randint(1, g.n))
        inner = rng.sample(outer, rng.randint(1, len(outer)))
        twice = induced_subgraph(induced_subgraph(g, outer), inner)
        once = induced_subgraph(g, inner)
        self.assertEqual(twice.labels, once.labels)
        self.assertEqual(twice.edges, once.edges)
        self.assertEqual(twice.rotation, once.rotation)
        self.assertEqual(twice.outer, once.outer)

    @SLOW
    @given(planar_graphs(min_nodes=3, max_nodes=30, wmax=6))
    def test_girth_is_the_lightest_block(self, g):
        """The oracle girth is the minimum over biconnected blocks."""
        blocks = biconnected_components(g)
        self.assertEqual(min((brute_girth(b) for b in blocks), default=INFINITY), brute_girth(g))
