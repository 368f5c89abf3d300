"""Presentation graphs of right-angled Coxeter groups.

A presentation graph has one vertex per generator and an edge between two
generators exactly when they commute (m(s,t) = 2).  Non-adjacent distinct
generators generate an infinite dihedral group (m(s,t) = inf).

Vertex subsets are handled internally as bitmasks over the declaration
order; the public API speaks in frozensets of generator names.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

__all__ = [
    'PresentationGraph', 'SeparatorWitness', 'VfsWitness', 'VfsSearch',
    'ParseError', 'MalformedTokenError', 'UnknownVertexError', 'SelfLoopError',
    'EmptyGeneratorsError', 'UnknownGeneratorError',
    'parse_presentation', 'format_native', 'format_dot',
    'link', 'is_separating', 'find_clique_separator', 'ends_class',
    'find_visual_z2z2_power', 'find_dihedral_factor',
    'find_virtual_factor_separator', 'search_virtual_factor_separator',
    'find_mr_nonlocal_witness', 'is_vfs',
]

NAME_RE = re.compile(r"[A-Za-z0-9_']+\Z")
COMPLETE_SEARCH_LIMIT = 16


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f'line {line}: {message}')
        self.line = line


class MalformedTokenError(ParseError):
    pass


class UnknownVertexError(ParseError):
    pass


class SelfLoopError(ParseError):
    pass


class EmptyGeneratorsError(ParseError):
    pass


class UnknownGeneratorError(ValueError):
    pass


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count('1')


@dataclass(frozen=True)
class PresentationGraph:
    generators: tuple[str, ...]
    commuting: frozenset[frozenset[str]]
    adj: tuple[int, ...] = field(init=False, repr=False, compare=False)
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise ValueError('duplicate generator names')
        index = {name: i for i, name in enumerate(self.generators)}
        adj = [0] * len(self.generators)
        for pair in self.commuting:
            if len(pair) != 2:
                raise ValueError(f'self-pair {sorted(pair)}')
            u, v = sorted(pair, key=lambda x: index.get(x, -1))
            if u not in index or v not in index:
                raise ValueError(f'undeclared generator in pair {sorted(pair)}')
            adj[index[u]] |= 1 << index[v]
            adj[index[v]] |= 1 << index[u]
        object.__setattr__(self, 'index', index)
        object.__setattr__(self, 'adj', tuple(adj))

    @classmethod
    def from_edges(cls, generators: Iterable[str], edges: Iterable[tuple[str, str]]) -> 'PresentationGraph':
        return cls(tuple(generators), frozenset(frozenset(e) for e in edges))

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def commute(self, s: int, t: int) -> bool:
        """True iff generator indices s and t commute (includes s == t)."""
        return s == t or bool(self.adj[s] >> t & 1)

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            try:
                m |= 1 << self.index[name]
            except KeyError:
                raise UnknownGeneratorError(f'unknown generator {name!r}') from None
        return m

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(self.generators[i] for i in bits(mask))

    def sorted_names(self, names: Iterable[str]) -> list[str]:
        return sorted(names, key=self.index.__getitem__)

    def edge_list(self) -> list[tuple[str, str]]:
        return [(self.generators[i], self.generators[j])
                for i in range(self.n) for j in bits(self.adj[i]) if i < j]

    def link_mask(self, mask: int) -> int:
        out = self.full
        for i in bits(mask):
            out &= self.adj[i]
        return out

    def is_clique(self, mask: int) -> bool:
        return all(mask & ~(1 << i) & ~self.adj[i] == 0 for i in bits(mask))

    def induced(self, names: Iterable[str]) -> 'PresentationGraph':
        keep = self.mask(names)
        gens = tuple(self.generators[i] for i in bits(keep))
        edges = [e for e in self.edge_list() if e[0] in gens and e[1] in gens]
        return PresentationGraph.from_edges(gens, edges)

    def components(self, removed: int) -> list[int]:
        """Connected components of the graph minus `removed`, as masks, ordered by least vertex."""
        rest = self.full & ~removed
        comps = []
        while rest:
            frontier = rest & -rest
            comp = 0
            while frontier:
                comp |= frontier
                nxt = 0
                for i in bits(frontier):
                    nxt |= self.adj[i]
                frontier = nxt & rest & ~comp
            comps.append(comp)
            rest &= ~comp
        return comps

    def cliques(self) -> list[int]:
        """All cliques (including the empty one), by size then lexicographically."""
        found = [0]
        layer = [0]
        while layer:
            nxt = []
            for c in layer:
                top = c.bit_length()
                cand = self.link_mask(c) & ~((1 << top) - 1)
                for i in bits(cand):
                    nxt.append(c | 1 << i)
            nxt.sort(key=lambda m: lex_key(m))
            found.extend(nxt)
            layer = nxt
        return found


def lex_key(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def subsets_by_size(mask: int) -> Iterator[int]:
    """Subsets of mask, by size then lexicographically in index order."""
    members = list(bits(mask))
    for k in range(len(members) + 1):
        for combo in itertools.combinations(members, k):
            yield sum(1 << i for i in combo)


@dataclass(frozen=True)
class SeparatorWitness:
    cut: frozenset[str]
    components: tuple[frozenset[str], ...]


@dataclass(frozen=True)
class VfsWitness:
    c: frozenset[str]
    d: frozenset[str]
    s: str
    t: str


@dataclass(frozen=True)
class VfsSearch:
    witness: VfsWitness | None
    complete: bool


# parsing

def parse_presentation(text: str) -> PresentationGraph:
    """Parse the native line format or the undirected DOT subset."""
    stripped = [ln.strip() for ln in text.splitlines()]
    first = next((ln for ln in stripped if ln and not ln.startswith(('#', '//'))), '')
    if re.match(r'(strict\s+)?(graph|digraph)\b', first):
        return _parse_dot(text)
    return _parse_native(text)


def _check_name(name: str, line: int) -> str:
    if not NAME_RE.match(name):
        raise MalformedTokenError(line, f'malformed generator name {name!r}')
    return name


def _parse_native(text: str) -> PresentationGraph:
    gens: list[str] | None = None
    edges: list[tuple[str, str, int]] = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        last = lineno
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        head, *rest = line.split()
        if head == 'vertices':
            if gens is not None:
                raise MalformedTokenError(lineno, 'second vertices line')
            gens = []
            for tok in rest:
                _check_name(tok, lineno)
                if tok in gens:
                    raise MalformedTokenError(lineno, f'duplicate vertex {tok!r}')
                gens.append(tok)
            if not gens:
                raise EmptyGeneratorsError(lineno, 'empty generator list')
        elif head == 'edges':
            if gens is None:
                raise MalformedTokenError(lineno, 'edges line before vertices line')
            for tok in rest:
                parts = tok.split('-')
                if len(parts) != 2:
                    raise MalformedTokenError(lineno, f'malformed edge token {tok!r}')
                edges.append((_check_name(parts[0], lineno), _check_name(parts[1], lineno), lineno))
        else:
            raise MalformedTokenError(lineno, f'unknown directive {head!r}')
    if gens is None:
        raise EmptyGeneratorsError(max(last, 1), 'no vertices line')
    return _assemble(gens, edges)


def _assemble(gens: list[str], edges: list[tuple[str, str, int]]) -> PresentationGraph:
    known = set(gens)
    pairs = set()
    for u, v, lineno in edges:
        for x in (u, v):
            if x not in known:
                raise UnknownVertexError(lineno, f'unknown vertex {x!r}')
        if u == v:
            raise SelfLoopError(lineno, f'self-loop at {u!r}')
        pairs.add(frozenset((u, v)))
    return PresentationGraph(tuple(gens), frozenset(pairs))


_DOT_TOKEN = re.compile(r'\s+|//[^\n]*|#[^\n]*|/\*.*?\*/|"(?:[^"\\]|\\.)*"|--|->|[{}\[\];=,]|[A-Za-z0-9_\'.]+', re.S)


def _dot_tokens(text: str) -> list[tuple[str, int]]:
    out = []
    pos, line = 0, 1
    while pos < len(text):
        m = _DOT_TOKEN.match(text, pos)
        if m is None:
            raise MalformedTokenError(line, f'unexpected character {text[pos]!r}')
        tok = m.group()
        if not (tok.isspace() or tok.startswith(('//', '#', '/*'))):
            out.append((tok, line))
        line += tok.count('\n')
        pos = m.end()
    return out


def _parse_dot(text: str) -> PresentationGraph:
    toks = _dot_tokens(text)
    i = 0

    def peek():
        return toks[i] if i < len(toks) else ('', toks[-1][1] if toks else 1)

    def take(expected=None):
        nonlocal i
        tok, line = peek()
        if expected is not None and tok != expected:
            raise MalformedTokenError(line, f'expected {expected!r}, found {tok!r}')
        i += 1
        return tok, line

    def skip_attrs():
        while peek()[0] == '[':
            take('[')
            while peek()[0] not in (']', ''):
                take()
            take(']')

    def node_id():
        tok, line = take()
        if tok.startswith('"'):
            tok = tok[1:-1]
        return _check_name(tok, line), line

    tok, line = take()
    if tok == 'strict':
        tok, line = take()
    if tok == 'digraph':
        raise MalformedTokenError(line, 'directed graphs are not supported')
    if tok != 'graph':
        raise MalformedTokenError(line, f'expected graph, found {tok!r}')
    if peek()[0] != '{':
        take()
    take('{')
    gens: list[str] = []
    edges: list[tuple[str, str, int]] = []
    while True:
        tok, line = peek()
        if tok == '}':
            take()
            break
        if tok == '':
            raise MalformedTokenError(line, 'unterminated graph body')
        if tok == ';':
            take()
            continue
        if tok in ('graph', 'node', 'edge'):
            take()
            skip_attrs()
            continue
        if tok == '->':
            raise MalformedTokenError(line, 'directed edge in undirected graph')
        name, line = node_id()
        if peek()[0] == '=':
            take()
            take()
            continue
        chain = [name]
        while peek()[0] in ('--', '->'):
            op, oline = take()
            if op == '->':
                raise MalformedTokenError(oline, 'directed edge in undirected graph')
            chain.append(node_id()[0])
        skip_attrs()
        for v in chain:
            if v not in gens:
                gens.append(v)
        for u, v in zip(chain, chain[1:]):
            edges.append((u, v, line))
    if i < len(toks):
        raise MalformedTokenError(toks[i][1], f'trailing token {toks[i][0]!r}')
    if not gens:
        raise EmptyGeneratorsError(line, 'empty generator list')
    return _assemble(gens, edges)


def format_native(g: PresentationGraph) -> str:
    lines = ['vertices ' + ' '.join(g.generators)]
    if g.edge_list():
        lines.append('edges ' + ' '.join(f'{u}-{v}' for u, v in g.edge_list()))
    return '\n'.join(lines) + '\n'


def format_dot(g: PresentationGraph) -> str:
    lines = ['graph G {']
    lines += [f'  {v} [label="{v}"];' for v in g.generators]
    lines += [f'  {u} -- {v};' for u, v in g.edge_list()]
    lines.append('}')
    return '\n'.join(lines) + '\n'


# predicates

def link(g: PresentationGraph, a: Iterable[str]) -> frozenset[str]:
    """Common neighbours of every member of a (all of S when a is empty)."""
    return g.names(g.link_mask(g.mask(a)))


def _separator(g: PresentationGraph, cut: int) -> SeparatorWitness | None:
    comps = g.components(cut)
    if len(comps) < 2:
        return None
    return SeparatorWitness(g.names(cut), tuple(g.names(c) for c in comps))


def is_separating(g: PresentationGraph, c: Iterable[str]) -> SeparatorWitness | None:
    return _separator(g, g.mask(c))


def find_clique_separator(g: PresentationGraph) -> SeparatorWitness | None:
    for clique in g.cliques():
        w = _separator(g, clique)
        if w is not None:
            return w
    return None


def ends_class(g: PresentationGraph) -> str:
    nonadjacent = [(s, t) for s in range(g.n) for t in range(s + 1, g.n) if not g.commute(s, t)]
    if not nonadjacent:
        return 'finite'
    if len(nonadjacent) == 1:
        return 'two_ended'
    if find_clique_separator(g) is not None:
        return 'infinite_ended'
    return 'one_ended'


def _pairs(g: PresentationGraph, within: int) -> list[tuple[int, int]]:
    return [(s, t) for s in bits(within) for t in bits(within) if s < t and not g.commute(s, t)]


def find_visual_z2z2_power(g: PresentationGraph, k: int) -> list[tuple[str, str]] | None:
    """k disjoint non-adjacent pairs, each pair fully adjacent to the others."""
    if k < 1:
        raise ValueError('k must be positive')

    def extend(chosen: list[tuple[int, int]], allowed: int, start: int):
        if len(chosen) == k:
            return chosen
        for s, t in _pairs(g, allowed):
            if (s, t) <= start:
                continue
            found = extend(chosen + [(s, t)], allowed & g.adj[s] & g.adj[t], (s, t))
            if found:
                return found
        return None

    found = extend([], g.full, (-1, -1))
    if found is None:
        return None
    return [(g.generators[s], g.generators[t]) for s, t in found]


def find_dihedral_factor(g: PresentationGraph) -> tuple[str, str] | None:
    for s, t in _pairs(g, g.full):
        others = g.full & ~(1 << s) & ~(1 << t)
        if others & ~g.adj[s] == 0 and others & ~g.adj[t] == 0:
            return g.generators[s], g.generators[t]
    return None


def _vfs_ok(g: PresentationGraph, c: int, d: int, s: int, t: int) -> bool:
    if d & ~c or d & (1 << s | 1 << t) or g.commute(s, t):
        return False
    k = c & ~d
    if not g.is_clique(k) or k & ~g.link_mask(d):
        return False
    if d & ~g.adj[s] or d & ~g.adj[t]:
        return False
    return len(g.components(c)) >= 2


def is_vfs(g: PresentationGraph, w: VfsWitness) -> bool:
    """Check every defining condition of a virtual factor separator."""
    return _vfs_ok(g, g.mask(w.c), g.mask(w.d), g.index[w.s], g.index[w.t])


def search_virtual_factor_separator(g: PresentationGraph, complete: bool | None = None) -> VfsSearch:
    """Search pairs (s,t), then D within lk(s)∩lk(t), then cliques K within lk(D)-D.

    The complete search lets K contain s or t; the pruned search (used above
    the size limit unless forced) skips those.
    """
    if complete is None:
        complete = g.n <= COMPLETE_SEARCH_LIMIT
    for s, t in _pairs(g, g.full):
        st = 1 << s | 1 << t
        for d in subsets_by_size(g.adj[s] & g.adj[t]):
            room = g.link_mask(d) & ~d
            if not complete:
                room &= ~st
            for k in subsets_by_size(room):
                if not g.is_clique(k):
                    continue
                c = d | k
                if len(g.components(c)) >= 2:
                    w = VfsWitness(g.names(c), g.names(d), g.generators[s], g.generators[t])
                    return VfsSearch(w, complete)
    return VfsSearch(None, complete)


def find_virtual_factor_separator(g: PresentationGraph) -> VfsWitness | None:
    return search_virtual_factor_separator(g).witness


def find_mr_nonlocal_witness(g: PresentationGraph) -> tuple[str, str] | None:
    """First non-adjacent (v,w) whose common link separates, leaving a vertex besides v and w."""
    for v, w in _pairs(g, g.full):
        cut = g.adj[v] & g.adj[w]
        if g.full & ~cut & ~(1 << v | 1 << w) and len(g.components(cut)) >= 2:
            return g.generators[v], g.generators[w]
    return None
