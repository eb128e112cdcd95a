import json
import math
import sys
import time
import tracemalloc

from django.core.management import call_command
from django.core.management.base import BaseCommand, CommandError
from django.db import connections

from graphs import generator
from graphs.distance import dist_to_json
from graphs.exceptions import BadParameter, GraphError, InvariantViolation, NoWitness
from graphs.parsing import parse_graph, write_graph
from graphs.planegraph import outerplane_depths

from girth.conf import GirthConfig
from girth.dissection import build_dissection, validate_dissection
from girth.engine import compute_girth, lookup_for
from girth.leaf_lookup import LookupStore
from girth.preprocess import ShortcutGirth, normalize


def parse_sizes(text):
    """``a,b,c`` or a ladder ``lo..hi`` growing by a factor of four."""
    try:
        if '..' in text:
            lo, hi = (int(float(part)) for part in text.split('..', 1))
            if lo < 1 or hi < lo:
                raise ValueError
            sizes = []
            n = lo
            while n <= hi:
                sizes.append(n)
                n *= 4
            return sizes
        return [int(float(part)) for part in text.split(',') if part.strip()]
    except ValueError:
        raise BadParameter(f'Malformed size list {text!r}.') from None


def loglog_slope(points):
    """Least-squares slope of log(millis) against log(n)."""
    pts = [(math.log(n), math.log(max(ms, 1e-3))) for n, ms in points if n > 0]
    if len(pts) < 2:
        return float('nan')
    mx = sum(x for x, _ in pts) / len(pts)
    my = sum(y for _, y in pts) / len(pts)
    sxx = sum((x - mx) ** 2 for x, _ in pts)
    if sxx == 0:
        return float('nan')
    return sum((x - mx) * (y - my) for x, y in pts) / sxx


class Command(BaseCommand):
    help = 'Compute girths of planar graphs, emit witnesses, generate and check instances, benchmark.'

    def add_arguments(self, parser):
        sub = parser.add_subparsers(dest='subcommand', required=True)

        def with_config(p):
            p.add_argument('--ell', help='paper, scaled or fixed:<k>')
            p.add_argument('--lookup-cache', dest='lookup_cache', help='sqlite file for the lookup cache')
            p.add_argument('--oracle', action='store_true', help='answer with the exact oracle alone')
            p.add_argument(
                '--cross-check', dest='cross_check', action='store_true',
                help='run the pipeline and compare it with the exact oracle',
            )
            p.add_argument('--seed', type=int)
            p.add_argument('--threads', type=int)
            p.add_argument('--json', action='store_true', dest='as_json')
            return p

        compute = with_config(sub.add_parser('compute', help='girth of a graph file'))
        compute.add_argument('-i', '--input', default='-')
        compute.add_argument('--witness', action='store_true')

        witness = with_config(sub.add_parser('witness', help='a min-weight cycle of a graph file'))
        witness.add_argument('-i', '--input', default='-')

        gen = sub.add_parser('gen', help='write a generated graph')
        gen.add_argument('--kind', required=True, choices=['cycle', 'grid', 'wheel', 'random', 'figure'])
        gen.add_argument('--n', type=int, default=10)
        gen.add_argument('--rows', type=int)
        gen.add_argument('--cols', type=int)
        gen.add_argument('--fraction', type=float, default=0.3)
        gen.add_argument('--wmax', type=int, default=1)
        gen.add_argument('--fixture', default='1a')
        gen.add_argument('--seed', type=int)
        gen.add_argument('-o', '--out')

        check = with_config(sub.add_parser('check', help='validate a graph file and report'))
        check.add_argument('-i', '--input', default='-')
        check.add_argument('--embedding', action='store_true')
        check.add_argument('--dissect', action='store_true')
        check.add_argument('--normalize', action='store_true')

        bench = with_config(sub.add_parser('bench', help='time compute over a size ladder'))
        bench.add_argument('--kind', default='grid', choices=['grid', 'random', 'cycle', 'wheel'])
        bench.add_argument('--sizes', default='1000..16000')
        bench.add_argument('--max-seconds', dest='max_seconds', type=float, default=30.0)

    def handle(self, *args, **options):
        handler = getattr(self, f'handle_{options["subcommand"]}')
        try:
            handler(options)
        except InvariantViolation as exc:
            raise CommandError(f'internal invariant violated: {exc}', returncode=2) from exc
        except GraphError as exc:
            raise CommandError(str(exc), returncode=1) from exc

    # helpers

    def _config(self, options, **extra):
        return GirthConfig.from_settings(
            ell=options.get('ell'),
            lookup_cache=options.get('lookup_cache'),
            oracle=options.get('oracle') or None,
            cross_check=options.get('cross_check') or None,
            seed=options.get('seed'),
            threads=options.get('threads'),
            **extra,
        )

    def _read(self, path):
        if path == '-':
            stream = getattr(sys.stdin, 'buffer', sys.stdin)
            return parse_graph(stream.read())
        try:
            with open(path, 'rb') as handle:
                return parse_graph(handle.read())
        except OSError as exc:
            raise BadParameter(f'Cannot read {path}: {exc.strerror}.') from None

    def _emit(self, options, payload, text):
        if options.get('as_json'):
            self.stdout.write(json.dumps(payload, sort_keys=True))
        else:
            self.stdout.write(text)

    def _run(self, g, config):
        lt = lookup_for(config, g)
        store = None
        if config.lookup_cache:
            store = LookupStore()
            self._use_cache_db(config.lookup_cache)
            store.load(lt)
        result = compute_girth(g, config, lt)
        if store is not None:
            store.flush(lt)
        return result

    def _use_cache_db(self, path):
        connection = connections['default']
        connection.close()
        connection.settings_dict['NAME'] = path
        call_command('migrate', 'girth', verbosity=0, interactive=False)

    # subcommands

    def handle_compute(self, options):
        g = self._read(options['input'])
        config = self._config(options, witness=options['witness'] or None)
        result = self._run(g, config)
        text = f'girth: {dist_to_json(result.girth)}'
        if result.witness_cycle:
            text += '\nwitness: ' + ' '.join(str(x) for x in result.witness_cycle)
        self._emit(options, result.to_json(), text)

    def handle_witness(self, options):
        g = self._read(options['input'])
        result = self._run(g, self._config(options, witness=True))
        if result.witness_cycle is None:
            raise NoWitness('The graph is acyclic; there is no cycle to report.')
        self._emit(
            options,
            {'girth': dist_to_json(result.girth), 'witness': result.witness_cycle},
            '\n'.join(str(x) for x in result.witness_cycle),
        )

    def handle_gen(self, options):
        kind = options['kind']
        seed = options['seed']
        if kind == 'cycle':
            g = generator.generate('cycle', n=options['n'])
        elif kind == 'grid':
            rows = options['rows'] or options['n']
            g = generator.generate('grid', rows=rows, cols=options['cols'] or rows)
        elif kind == 'wheel':
            g = generator.generate('wheel', n=options['n'])
        elif kind == 'random':
            if seed is None:
                raise BadParameter('--kind random needs --seed.')
            g = generator.generate(
                'random_planar', n=options['n'], extra_edge_fraction=options['fraction'], seed=seed
            )
        else:
            g = generator.generate('figure_fixture', fixture_id=options['fixture'])
        if options['wmax'] > 1:
            g = generator.generate('random_weights', g=g, wmax=options['wmax'], seed=seed or 0)
        text = write_graph(g, comment=f'generated kind={kind} seed={seed}')
        if options['out']:
            with open(options['out'], 'w', encoding='utf-8') as handle:
                handle.write(text)
        else:
            self.stdout.write(text, ending='')

    def handle_check(self, options):
        g = self._read(options['input'])
        config = self._config(options)
        report = {'planar': True, 'n': g.n, 'm': g.m}
        if options['embedding']:
            faces = g.faces()
            outer = g.outer_faces()
            report['embedding'] = {
                'euler': g.euler_ok(),
                'faces': len(faces),
                'outer_face_size': len(outer[0]) if outer else 0,
                'radius': outerplane_depths(g).radius,
            }
        if options['dissect']:
            r = outerplane_depths(g).radius
            tree = build_dissection(g, r, config.ell)
            report['dissection'] = validate_dissection(tree, g, r, config.ell).as_dict()
        if options['normalize']:
            normalized = normalize(g)
            report['normalize'] = dict(normalized.stats)
            if isinstance(normalized, ShortcutGirth):
                report['normalize']['girth'] = dist_to_json(normalized.girth)
        lines = [f'{key}: {json.dumps(value, sort_keys=True)}' for key, value in report.items()]
        self._emit(options, report, '\n'.join(lines))

    def handle_bench(self, options):
        config = self._config(options)
        seed = config.seed
        points = []
        peak = 0
        self.stdout.write('kind,n,m,millis,girth')
        for n in parse_sizes(options['sizes']):
            g = self._bench_graph(options['kind'], n, seed)
            tracemalloc.start()
            started = time.perf_counter()
            result = compute_girth(g, config)
            millis = (time.perf_counter() - started) * 1000
            peak = max(peak, tracemalloc.get_traced_memory()[1])
            tracemalloc.stop()
            points.append((g.n, millis))
            self.stdout.write(f'{options["kind"]},{g.n},{g.m},{millis:.1f},{dist_to_json(result.girth)}')
            if millis > options['max_seconds'] * 1000:
                self.stderr.write(f'stopping: n={g.n} took {millis / 1000:.1f}s')
                break
        self.stdout.write(f'# slope={loglog_slope(points):.3f} peak_kib={peak // 1024}')

    def _bench_graph(self, kind, n, seed):
        if kind == 'grid':
            side = max(2, round(math.sqrt(n)))
            return generator.grid(side, side)
        if kind == 'cycle':
            return generator.cycle(max(3, n))
        if kind == 'wheel':
            return generator.wheel(max(3, n - 1))
        return generator.random_planar(n, 0.3, seed)
