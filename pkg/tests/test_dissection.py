from unittest import mock

from django.test import SimpleTestCase, tag
from hypothesis import given

from graphs import generator
from graphs.exceptions import BadParameter, InvariantViolation, NotEmbedded
from graphs.planegraph import biconnected_components, outerplane_depths

from girth.conf import EllPolicy
from girth.dissection import (
    SpanningTree,
    build_dissection,
    decomposition_tree,
    descend,
    tree_from_nested,
    triangulate_low_diameter,
    validate_dissection,
)
from girth.preprocess import ShortcutGirth, normalize

from .strategies import SLOW, corpus, planar_graphs

# separator {2,7,10} over the {5} side and the {8} side
FIGURE_TREE = (
    {2, 7, 10},
    ({5, 10}, {1, 2, 5, 6, 7, 10}, {5, 9, 10}),
    ({7, 8}, {2, 3, 4, 7, 8}, {7, 8, 10, 11, 12}),
)

DECOMPOSITION = (
    {2, 7, 10},
    ({5}, {1, 6}, {9}),
    ({8}, {3, 4}, {11, 12}),
)


def vertex_with(t, nodes):
    return t.nodes.index(frozenset(nodes))


class TreeTests(SimpleTestCase):
    def setUp(self):
        self.tree = tree_from_nested(FIGURE_TREE)

    def test_preorder_numbering(self):
        """Vertex 0 is the root and children follow their parent."""
        t = self.tree
        self.assertEqual(len(t), 7)
        self.assertEqual(t.nodes[t.root], frozenset({2, 7, 10}))
        self.assertTrue(all(t.parent[v] < v for v in range(1, len(t))))
        self.assertEqual(len(t.leaves()), 4)
        self.assertEqual(t.height, 2)

    def test_border_of_right_separator(self):
        """border({7,8}) is {2,7,8,10}."""
        t = self.tree
        s = vertex_with(t, {7, 8})
        self.assertEqual(t.border[s], frozenset({2, 7, 8, 10}))
        self.assertEqual(t.below[s], frozenset({2, 3, 4, 7, 8, 10, 11, 12}))
        self.assertEqual(t.inherit[s], frozenset({2, 7, 10}))

    def test_leaf_border_is_inherit(self):
        """A leaf's border is what it shares with its ancestors."""
        t = self.tree
        leaf = vertex_with(t, {2, 3, 4, 7, 8})
        self.assertEqual(t.border[leaf], frozenset({2, 7, 8}))

    def test_shape_round_trip(self):
        """shape() rebuilds the same tree."""
        again = tree_from_nested(self.tree.shape())
        self.assertEqual(again.nodes, self.tree.nodes)

    def test_with_extra(self):
        """with_extra adds labels to the root and the leaves; inner vertices inherit them."""
        t = self.tree.with_extra({99})
        self.assertIn(99, t.nodes[t.root])
        self.assertTrue(all(99 in t.nodes[v] for v in t.leaves()))
        self.assertTrue(all(99 not in t.nodes[v] for v in t.nonleaves() if v != t.root))
        self.assertTrue(all(99 in t.border[v] for v in range(len(t))))
        self.assertEqual(t.left, self.tree.left)

    def test_figure_tree_validates(self):
        """The hand-built tree passes every structural check."""
        g = generator.figure_fixture('3a')
        report = validate_dissection(self.tree, g, 2, 6)
        self.assertTrue(report.ok, report.violations)
        self.assertEqual(report.measured['max_leaf'], 6)

    def test_broken_tree_is_reported(self):
        """A tree whose sides share an edge fails validation."""
        g = generator.figure_fixture('3a')
        bad = tree_from_nested(({2, 7, 10}, {1, 5, 6, 9, 2, 7, 10}, {3, 4, 8, 11, 12, 2, 7, 10, 6}))
        report = validate_dissection(bad, g, 2, 6)
        self.assertFalse(report.ok)


class DescendTests(SimpleTestCase):
    def test_decomposition_tree_descends(self):
        """Separator nodes sink into the sides they touch."""
        g = generator.figure_fixture('4a')
        t = descend(tree_from_nested(DECOMPOSITION), g)
        expected = tree_from_nested(FIGURE_TREE)
        self.assertEqual(t.nodes, expected.nodes)
        self.assertEqual(t.left, expected.left)
        self.assertTrue(validate_dissection(t, g, 2, 6).ok)

    def test_empty_side_is_pruned(self):
        """A separator with an empty side disappears."""
        g = generator.cycle(4)
        t = descend(tree_from_nested(({1}, set(), {2, 3, 4})), g)
        self.assertEqual(len(t), 1)
        self.assertEqual(t.nodes[0], frozenset({1, 2, 3, 4}))

    def test_memberships_follow_degree(self):
        """Normalized blocks keep every node within degree+1 vertices per path."""
        for g in corpus(size=8, max_nodes=90):
            for block in biconnected_components(g):
                if block.n < 3:
                    continue
                normalized = normalize(block)
                if isinstance(normalized, ShortcutGirth):
                    continue
                graph = normalized.graph
                r = outerplane_depths(graph).radius
                t = build_dissection(graph, r, 8)
                report = validate_dissection(t, graph, r, 8)
                self.assertTrue(report.ok, report.violations)
                for vid in t.leaves():
                    self.assertLessEqual(len(t.nodes[vid]), 8 + t.carried[vid])

    def test_excess_memberships_are_reported(self):
        """A label repeated down one path and across the tree fails both checks."""
        g = generator.cycle(4)
        every = {1, 2, 3, 4}
        t = tree_from_nested((every, (every, (every, every, every), every), every))
        report = validate_dissection(t, g, 1, 4)
        self.assertFalse(report.ok)
        self.assertIn('node 1 lies in 7 vertices', report.violations)
        self.assertIn('node 1 lies in 4 vertices of one root-to-leaf path', report.violations)

    def test_oversized_leaf_is_reported(self):
        """Hand-built trees have no carried allowance, so leaves answer to the limit alone."""
        g = generator.cycle(6)
        t = tree_from_nested(({1, 4}, {1, 2, 3, 4}, {4, 5, 6, 1}))
        self.assertTrue(validate_dissection(t, g, 1, 4).ok)
        report = validate_dissection(t, g, 1, 3)
        self.assertFalse(report.ok)
        self.assertTrue(any(v.startswith('leaf ') for v in report.violations))
        self.assertEqual(report.measured['c_leaf'], round(4 / 3, 3))


class TriangulationTests(SimpleTestCase):
    def test_needs_embedding(self):
        """Triangulation refuses abstract graphs."""
        with self.assertRaises(NotEmbedded):
            triangulate_low_diameter(generator.grid(3, 3).without_rotation())

    def test_grid_becomes_triangulated(self):
        """Every face of the result is a triangle and the tree spans it."""
        g = generator.grid(5, 5)
        delta, tree = triangulate_low_diameter(g)
        self.assertEqual(delta.m, 3 * delta.n - 6)
        self.assertTrue(all(len(face) == 3 for face in delta.faces()))
        self.assertEqual(sum(1 for p in tree.parent if p < 0), 1)
        r = outerplane_depths(g).radius
        self.assertLessEqual(tree.diameter(), 4 * r + 2)

    def test_tree_diameter_is_checked(self):
        """A spanning tree much wider than the radius is an internal error."""
        g = generator.grid(4, 4)
        r = outerplane_depths(g).radius
        with mock.patch.object(SpanningTree, 'diameter', return_value=10 ** 6):
            with self.assertRaises(InvariantViolation):
                triangulate_low_diameter(g, r)
        _, tree = triangulate_low_diameter(g, r)
        self.assertLessEqual(tree.diameter(), 4 * r + 2)

    @SLOW
    @given(planar_graphs(min_nodes=3, max_nodes=40))
    def test_random_graphs_triangulate(self, g):
        """Disconnected and sparse inputs come back as triangulations."""
        delta, tree = triangulate_low_diameter(g)
        self.assertEqual(delta.m, 3 * delta.n - 6)
        self.assertTrue(delta.euler_ok())
        for u, v, _ in g.edges:
            self.assertIsNotNone(delta.edge_id(u, v))

    def test_decomposition_pieces_shrink(self):
        """Every leaf of a decomposition has at most the limit of nodes."""
        g = generator.grid(6, 6)
        delta, tree = triangulate_low_diameter(g)
        t = decomposition_tree(delta, tree, 8)
        self.assertEqual(t.below[t.root], frozenset(g.labels))
        self.assertTrue(all(len(t.nodes[v]) <= 8 for v in t.leaves()))


class BuildDissectionTests(SimpleTestCase):
    def test_small_graph_is_one_leaf(self):
        """Graphs under the limit are a single leaf."""
        t = build_dissection(generator.grid(3, 3), 2, EllPolicy())
        self.assertEqual(len(t), 1)

    def test_grid_dissection_is_valid(self):
        """A grid with a small leaf limit passes validation."""
        g = generator.grid(8, 8)
        r = outerplane_depths(g).radius
        t = build_dissection(g, r, 10)
        report = validate_dissection(t, g, r, 10)
        self.assertTrue(report.ok, report.violations)
        self.assertGreater(len(t), 1)

    def test_policy_parse(self):
        """fixed:<k> is parsed; nonsense raises BadParameter."""
        self.assertEqual(EllPolicy.parse('fixed:12').ell(10 ** 6), 12)
        with self.assertRaises(BadParameter):
            EllPolicy.parse('tiny')

    @tag('acceptance')
    def test_corpus_dissections_are_valid(self):
        """Every normalized corpus block dissects into a valid tree."""
        for g in corpus(max_nodes=120):
            for block in biconnected_components(g):
                if block.n < 3:
                    continue
                normalized = normalize(block)
                if isinstance(normalized, ShortcutGirth):
                    continue
                self.check_block(normalized.graph)

    def check_block(self, graph):
        r = outerplane_depths(graph).radius
        t = build_dissection(graph, r, 12)
        report = validate_dissection(t, graph, r, 12)
        self.assertTrue(report.ok, report.violations)
