"""Line-oriented graph file format.

::

    c comment
    p planar <n> <m>
    e <u> <v> <w>          (1-based node ids, w >= 0)
    r <v> <e1> <e2> ...    (1-based edge indices around v, clockwise)
"""
import enum
import logging

from .exceptions import NegativeWeight, ParseError
from .planegraph import PlaneGraph, embed

logger = logging.getLogger(__name__)


class GraphFormat(enum.Enum):
    EDGELIST = 'edgelist'
    EDGELIST_WITH_ROTATION = 'edgelist_with_rotation'


def _int(token, line_number, what):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f'{what} must be an integer, got {token!r}', line_number) from None


def parse_graph(text, format=None):
    """Parse the graph grammar; embed when no rotation is given."""
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as exc:
            line_number = text.count(b'\n', 0, exc.start) + 1
            raise ParseError(f'input is not valid UTF-8 at byte {exc.start}', line_number) from None
    if isinstance(format, str):
        format = GraphFormat(format)
    header = None
    edges = []
    rotation = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == 'c':
            continue
        kind = tokens[0]
        if kind == 'p':
            if header is not None:
                raise ParseError('duplicate header', line_number)
            if len(tokens) != 4 or tokens[1] != 'planar':
                raise ParseError('header must read "p planar <n> <m>"', line_number)
            header = (_int(tokens[2], line_number, 'n'), _int(tokens[3], line_number, 'm'))
            if header[0] < 0 or header[1] < 0:
                raise ParseError('header counts must be nonnegative', line_number)
            continue
        if header is None:
            raise ParseError('missing "p planar" header before data', line_number)
        n = header[0]
        if kind == 'e':
            if len(tokens) != 4:
                raise ParseError('edge line must read "e <u> <v> <w>"', line_number)
            u, v, w = (_int(t, line_number, 'edge field') for t in tokens[1:])
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f'edge endpoint out of range 1..{n}', line_number)
            if w < 0:
                raise NegativeWeight(f'line {line_number}: negative weight {w}')
            edges.append((u - 1, v - 1, w))
        elif kind == 'r':
            if len(tokens) < 2:
                raise ParseError('rotation line must name a node', line_number)
            v = _int(tokens[1], line_number, 'rotation node')
            if not 1 <= v <= n:
                raise ParseError(f'rotation node out of range 1..{n}', line_number)
            if v - 1 in rotation:
                raise ParseError(f'duplicate rotation for node {v}', line_number)
            rotation[v - 1] = [_int(t, line_number, 'edge index') - 1 for t in tokens[2:]]
        else:
            raise ParseError(f'unknown line type {kind!r}', line_number)
    if header is None:
        raise ParseError('empty input: missing "p planar" header')
    n, m = header
    if len(edges) != m:
        raise ParseError(f'header announces {m} edges, found {len(edges)}')
    if format is None:
        format = GraphFormat.EDGELIST_WITH_ROTATION if rotation else GraphFormat.EDGELIST
    labels = list(range(1, n + 1))
    if format is GraphFormat.EDGELIST:
        if rotation:
            raise ParseError('rotation lines given for plain edge-list format')
        graph = PlaneGraph(labels, edges)
        return embed(graph)
    for v, order in rotation.items():
        for eid in order:
            if not 0 <= eid < m:
                raise ParseError(f'rotation of node {v + 1} names missing edge {eid + 1}')
    full = [rotation.get(v, []) for v in range(n)]
    graph = PlaneGraph(labels, edges, full)
    logger.debug('parsed graph with rotation', extra={'n': n, 'm': m})
    return graph


def write_graph(g, with_rotation=True, comment=None):
    """Serialise in the grammar read by :func:`parse_graph` (ids are index + 1)."""
    lines = []
    if comment:
        lines.extend(f'c {text}' for text in comment.splitlines())
    lines.append(f'p planar {g.n} {g.m}')
    lines.extend(f'e {u + 1} {v + 1} {w}' for u, v, w in g.edges)
    if with_rotation and g.is_embedded:
        for v, rot in enumerate(g.rotation):
            if rot:
                lines.append(' '.join(['r', str(v + 1)] + [str(eid + 1) for eid in rot]))
    return '\n'.join(lines) + '\n'
