"""Error types raised by the graph substrate and the girth pipeline."""
from django.core.exceptions import ValidationError


class GraphError(ValidationError):
    """Base class for input and precondition failures (CLI exit code 1)."""

    default_code = 'graph_error'

    def __init__(self, message, code=None, params=None):
        super().__init__(message, code=code or self.default_code, params=params)

    def __str__(self):
        return self.message


class ParseError(GraphError):
    default_code = 'parse_error'

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f'line {line_number}: {message}'
        super().__init__(message)
        self.line_number = line_number


class NonSimple(GraphError):
    default_code = 'non_simple'


class NegativeWeight(GraphError):
    default_code = 'negative_weight'


class NotPlanar(GraphError):
    default_code = 'not_planar'


class NotEmbedded(GraphError):
    default_code = 'not_embedded'


class UnknownNode(GraphError):
    default_code = 'unknown_node'


class UnknownEdge(GraphError):
    default_code = 'unknown_edge'


class NotBiconnected(GraphError):
    default_code = 'not_biconnected'


class PreconditionViolated(GraphError):
    default_code = 'precondition_violated'


class DegreeTooSmall(GraphError):
    default_code = 'degree_too_small'


class NotNeighbor(GraphError):
    default_code = 'not_neighbor'


class NotMinDepthNeighbor(GraphError):
    default_code = 'not_min_depth_neighbor'


class NotTriangulated(GraphError):
    default_code = 'not_triangulated'


class InclusionViolated(GraphError):
    default_code = 'inclusion_violated'


class TooLarge(GraphError):
    default_code = 'too_large'


class WeightTooLarge(GraphError):
    default_code = 'weight_too_large'


class WeightedInput(GraphError):
    default_code = 'weighted_input'


class BadParameter(GraphError):
    default_code = 'bad_parameter'


class NoWitness(GraphError):
    default_code = 'no_witness'


class ZeroCycleCollapse(GraphError):
    """Expanding merged the endpoints of a cycle into a loop or a parallel pair.

    ``candidate`` is the weight of the collapsed cycle and ``graph`` the
    simplified expansion; girth is the min of the two.
    """

    default_code = 'zero_cycle_collapse'

    def __init__(self, candidate, graph, node_map=None):
        super().__init__(f'expansion collapsed a cycle of weight {candidate}')
        self.candidate = candidate
        self.graph = graph
        self.node_map = node_map


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (CLI exit code 2)."""
