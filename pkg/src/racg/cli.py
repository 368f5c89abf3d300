"""Command-line front end: ``racg COMMAND FILE ...``.

FILE is a path, ``-`` for standard input, ``fixture:NAME`` for a bundled
graph, or ``inline:TEXT`` with ``;`` standing for newlines.  Words follow
``--`` so generator names never collide with flags.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .classify import classify, explain, verdict_json
from .filters import AvoidPathError, FilterError, build_filter, default_spines, export_filter, extend_spine
from .fixtures import FIXTURES, fixture
from .oracle import LEMMAS, BallCapExceeded, ball
from .presentation import (
    ParseError, PresentationGraph, UnknownGeneratorError, ends_class, find_clique_separator,
    find_dihedral_factor, find_mr_nonlocal_witness, find_visual_z2z2_power, parse_presentation,
    search_virtual_factor_separator,
)
from .verify import UnknownLemmaError, reports_json, reports_text, run_all, run_suite
from .walls import (
    DiamondError, DirectionAmbiguityError, HypothesisViolation, PreconditionError,
    back_combing, diamond, path_walls,
)
from .words import GroupElement, InvalidGeneratorError, deletable_pair, format_word, is_geodesic, normal_form, parse_word

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2
EXIT_HYPOTHESIS = 3
EXIT_INPUT = 4
EXIT_PRECONDITION = 5
EXIT_CAP = 6
EXIT_FILTER = 7


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def load_graph(source: str) -> PresentationGraph:
    if source.startswith('fixture:'):
        name = source[len('fixture:'):]
        if name not in FIXTURES:
            raise UsageError(f'unknown fixture {name!r}; choose from {", ".join(FIXTURES)}')
        return fixture(name)
    if source.startswith('inline:'):
        return parse_presentation(source[len('inline:'):].replace(';', '\n'))
    if source == '-':
        return parse_presentation(sys.stdin.read())
    path = Path(source)
    if not path.is_file():
        raise UsageError(f'no such file: {source}')
    return parse_presentation(path.read_text(encoding='utf-8'))


def _word(g: PresentationGraph, text: str | list[str] | None) -> tuple[int, ...]:
    if text is None:
        return ()
    return parse_word(g, text)


def _fmt(g: PresentationGraph, w) -> str:
    s = format_word(g, w)
    return s if s else '(empty)'


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog='racg', description='Right-angled Coxeter groups: geodesics, walls, filters, '
                                         'and local connectivity of the boundary.')
    sub = p.add_subparsers(dest='command', required=True, parser_class=_Parser)

    def cmd(name, help_):
        c = sub.add_parser(name, help=help_)
        c.add_argument('file', help='graph file, -, fixture:NAME or inline:TEXT')
        return c

    c = cmd('classify', 'decide local connectivity of the boundary')
    c.add_argument('--json', action='store_true')
    c.add_argument('--strict', action='store_true', help='exit 3 on hypothesis-violated verdicts')
    for name, help_ in (('nf', 'ShortLex normal form'), ('geodesic', 'geodesic test'),
                        ('walls', 'wall reflection of each edge'), ('combing', 'back combing to the identity')):
        c = cmd(name, help_)
        c.add_argument('word', nargs='*')
    c = cmd('diamond', 'diamond of two split geodesics')
    for flag in ('--p1a', '--p1b', '--p2a', '--p2b'):
        c.add_argument(flag, required=True, metavar='W')
    c = cmd('filter', 'build a filter')
    c.add_argument('--left', metavar='W')
    c.add_argument('--right', metavar='W')
    c.add_argument('--shared', default='', metavar='W')
    c.add_argument('--depth', type=int, default=4)
    c.add_argument('--strategy', choices=('basic', 'directed'), default='basic')
    c.add_argument('--format', choices=('dot', 'json'), default='json')
    c = cmd('ball', 'Cayley ball')
    c.add_argument('--radius', type=int, required=True)
    c.add_argument('--format', choices=('dot', 'text'), default='text')
    c = cmd('verify', 'run a lemma verification suite')
    c.add_argument('--lemma', required=True, help='lemma id or all: ' + ', '.join(LEMMAS))
    c.add_argument('--radius', type=int)
    c.add_argument('--length', type=int)
    c.add_argument('--depth', type=int)
    c.add_argument('--seed', type=int, default=0)
    c.add_argument('--jobs', type=int, default=1)
    c.add_argument('--json', action='store_true')
    c.add_argument('--timing', action='store_true', help='include wall-clock seconds')
    cmd('separators', 'clique separators, dihedral factors, separators and witnesses')
    return p


def _classify(g, a, out):
    v = classify(g)
    out.write(verdict_json(v) if a.json else explain(v))
    if a.strict and v.status == 'hypothesis_violated':
        return EXIT_HYPOTHESIS
    return EXIT_OK


def _nf(g, a, out):
    out.write(format_word(g, normal_form(g, _word(g, a.word))) + '\n')
    return EXIT_OK


def _geodesic(g, a, out):
    w = _word(g, a.word)
    if is_geodesic(g, w):
        out.write('true\n')
    else:
        i, j = deletable_pair(g, w)
        out.write(f'false {i} {j}\n')
    return EXIT_OK


def _walls(g, a, out):
    w = _word(g, a.word)
    for k, (s, wall) in enumerate(zip(w, path_walls(g, w))):
        out.write(f'{k}\t{g.generators[s]}\t{_fmt(g, wall.reflection)}\n')
    return EXIT_OK


def _combing(g, a, out):
    x = normal_form(g, _word(g, a.word))
    comb = back_combing(g, x, GroupElement())
    for k, seg in enumerate(comb.segments, 1):
        out.write(f'{k}\t{format_word(g, seg)}\n')
    return EXIT_OK


def _diamond(g, a, out):
    p1 = (_word(g, a.p1a), _word(g, a.p1b))
    p2 = (_word(g, a.p2a), _word(g, a.p2b))
    d = diamond(g, p1, p2)
    for name in ('gamma1', 'tau1', 'delta1', 'delta2', 'tau2', 'gamma2'):
        out.write(f'{name:<7}{_fmt(g, getattr(d, name))}\n')
    out.write(f'{"anchor":<7}{_fmt(g, d.anchor)}\n')
    out.write(f'{"down":<7}{_fmt(g, d.down)}\n')
    return EXIT_OK


def _filter(g, a, out):
    shared = _word(g, a.shared)
    sl, sr = _word(g, a.left), _word(g, a.right)
    if not sl or not sr:
        dl, dr = default_spines(g, shared, 1)
        first = (sl[0] if sl else dl[0], sr[0] if sr else dr[0])
        dl, dr = default_spines(g, shared, 1, first)
        sl, sr = sl or dl, sr or dr
    sl = extend_spine(g, shared, sl, a.depth, min)
    sr = extend_spine(g, shared, sr, a.depth, max)
    f = build_filter(g, sl, sr, shared, a.depth, a.strategy)
    out.write(export_filter(f, a.format))
    return EXIT_OK


def _ball(g, a, out):
    b = ball(g, a.radius)
    if a.format == 'text':
        out.write(f'radius {a.radius}: {len(b)} elements\n')
        out.write('layers ' + ' '.join(map(str, b.layer_sizes)) + '\n')
        return EXIT_OK
    out.write('graph Ball {\n')
    for i, w in enumerate(b.canonical):
        out.write(f'  e{i} [label="{format_word(g, w)}"];\n')
    for i, s, j in b.edges():
        out.write(f'  e{i} -- e{j} [label="{g.generators[s]}"];\n')
    out.write('}\n')
    return EXIT_OK


def _verify(g, a, out):
    params = {'radius': a.radius, 'length': a.length, 'depth': a.depth}
    if a.lemma == 'all':
        reports = run_all(g, a.seed, a.jobs, **params)
    else:
        reports = [run_suite(g, a.lemma, a.seed, **params)]
    out.write(reports_json(reports, a.timing) if a.json else reports_text(reports, a.timing))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAILURES


def _separators(g, a, out):
    def fmt(xs):
        return '{' + ', '.join(g.sorted_names(xs)) + '}'

    out.write(f'ends: {ends_class(g)}\n')
    sep = find_clique_separator(g)
    out.write('clique separator: ' + (f'{fmt(sep.cut)} -> ' + ' | '.join(fmt(c) for c in sep.components)
                                      if sep else 'none') + '\n')
    d = find_dihedral_factor(g)
    out.write('dihedral factor: ' + (f'{d[0]}, {d[1]}' if d else 'none') + '\n')
    z = find_visual_z2z2_power(g, 3)
    out.write('(Z2*Z2)^3: ' + (', '.join(f'({s}, {t})' for s, t in z) if z else 'none') + '\n')
    s = search_virtual_factor_separator(g)
    if s.witness:
        w = s.witness
        out.write(f'virtual factor separator: C={fmt(w.c)} D={fmt(w.d)} s={w.s} t={w.t}\n')
    else:
        out.write('virtual factor separator: none' + ('' if s.complete else ' (pruned search)') + '\n')
    mr = find_mr_nonlocal_witness(g)
    out.write('separating common link: ' + (f'{mr[0]}, {mr[1]}' if mr else 'none') + '\n')
    return EXIT_OK


COMMANDS = {
    'classify': _classify, 'nf': _nf, 'geodesic': _geodesic, 'walls': _walls,
    'combing': _combing, 'diamond': _diamond, 'filter': _filter, 'ball': _ball,
    'verify': _verify, 'separators': _separators,
}


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        a = build_parser().parse_args(argv)
        g = load_graph(a.file)
        return COMMANDS[a.command](g, a, out)
    except (UsageError, ParseError, UnknownGeneratorError, UnknownLemmaError) as exc:
        err.write(f'racg: error: {exc}\n')
        return EXIT_USAGE
    except (InvalidGeneratorError, DiamondError) as exc:
        err.write(f'racg: invalid input: {exc}\n')
        return EXIT_INPUT
    except HypothesisViolation as exc:
        err.write(f'racg: hypothesis violated: {exc}\n')
        return EXIT_HYPOTHESIS
    except (PreconditionError, DirectionAmbiguityError) as exc:
        err.write(f'racg: precondition failed: {exc}\n')
        return EXIT_PRECONDITION
    except BallCapExceeded as exc:
        err.write(f'racg: {exc}\n')
        return EXIT_CAP
    except (FilterError, AvoidPathError) as exc:
        err.write(f'racg: filter construction failed: {exc}\n')
        return EXIT_FILTER


def main() -> None:
    sys.exit(run())
