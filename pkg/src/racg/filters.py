"""Fans and filters over a pair of diverging geodesics.

A filter is built level by level above a root node x_m.  Each node below
the top level carries one fan: its two upper edges (left and right) joined
by interior edges whose labels follow a path in the presentation graph
avoiding a forbidden set.  Consecutive fan labels commute, so each pair
closes into a loop one level further up; the loop's upper edges become the
left and right edges of the nodes they start from.  Nodes are never
identified, even when two of them carry the same group element.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .presentation import PresentationGraph, bits
from .walls import (
    DirectionAmbiguityError, DirectionSet, PreconditionError, ThresholdConfig,
    closure, diamond, edge_roots, _matrix, _normalize, _reduce, _right_mul, propagate_direction,
)
from .words import (
    GroupElement, InvalidGeneratorError, _append, _letters, back_set, distance,
    is_geodesic, multiply, normal_form,
)

__all__ = [
    'GammaPath', 'Fan', 'FilterNode', 'FilterEdge', 'Loop', 'Filter', 'FilterReport',
    'AvoidPathError', 'FilterError', 'EDGE_KINDS', 'PROPERTIES',
    'avoid_path', 'build_fan', 'build_filter', 'default_spines', 'extend_spine',
    'filter_walls', 'check_filter_properties', 'export_filter', 'filter_from_json',
]

EDGE_KINDS = ('left_fan', 'right_fan', 'interior', 'spine_left', 'spine_right')


class AvoidPathError(ValueError):
    pass


class FilterError(ValueError):
    pass


@dataclass(frozen=True)
class GammaPath:
    vertices: tuple[int, ...]

    @property
    def interior(self) -> tuple[int, ...]:
        return self.vertices[1:-1]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1


def avoid_path(g: PresentationGraph, s: int, t: int, avoid: int | Sequence[int] = 0) -> GammaPath:
    """Shortest walk s .. t of length at least two whose interior misses avoid.

    avoid is a bitmask or an iterable of generator indices.  When s = t the
    walk is s, a, s for the least admissible neighbour a; when s and t are
    adjacent the backtrack s, t, s, t is also a candidate.  The endpoints
    themselves are exempt from avoid wherever they occur.  Ties are broken
    lexicographically by the first differing vertex.
    """
    for x in (s, t):
        if type(x) is not int or not 0 <= x < g.n:
            raise InvalidGeneratorError(f'invalid generator index {x!r}')
    if not isinstance(avoid, int):
        avoid = sum(1 << x for x in set(avoid))
    adj = g.adj
    if s == t:
        for a in bits(adj[s] & ~avoid):
            return GammaPath((s, a, s))
        raise AvoidPathError(f'{g.generators[s]} has no neighbour outside the avoided set')
    allowed = g.full & ~avoid & ~(1 << s) & ~(1 << t)
    dist = {t: 0}
    queue = deque([t])
    while queue:
        x = queue.popleft()
        for y in bits(adj[x] & allowed):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    best = None
    firsts = [x for x in bits(adj[s] & allowed) if x in dist]
    if firsts:
        L = 1 + min(dist[x] for x in firsts)
        path = [s]
        x = min(x for x in firsts if dist[x] == L - 1)
        while x != t:
            path.append(x)
            x = min(y for y in bits(adj[x]) if y in dist and dist[y] == dist[x] - 1
                    and (y == t or allowed >> y & 1))
        path.append(t)
        best = tuple(path)
    if adj[s] >> t & 1:
        back = (s, t, s, t)
        if best is None or len(best) > 4 or (len(best) == 4 and back < best):
            best = back
    if best is None:
        raise AvoidPathError(f'no path from {g.generators[s]} to {g.generators[t]} avoiding the forbidden set')
    return GammaPath(best)


@dataclass(frozen=True)
class Fan:
    base: GroupElement
    left_label: int
    right_label: int
    interior_labels: tuple[int, ...]

    @property
    def labels(self) -> tuple[int, ...]:
        return (self.left_label,) + self.interior_labels + (self.right_label,)

    @property
    def loops(self) -> tuple[tuple[int, int], ...]:
        lab = self.labels
        return tuple(zip(lab, lab[1:]))


def build_fan(g: PresentationGraph, base_geodesic: Sequence[int], a: int, b: int, avoid=0) -> Fan:
    base_geodesic = _letters(g, base_geodesic)
    if not is_geodesic(g, base_geodesic):
        raise FilterError('base path is not geodesic')
    e = normal_form(g, base_geodesic)
    B = back_set(g, e)
    if a in B or b in B:
        raise FilterError('fan labels point back to the root')
    if not isinstance(avoid, int):
        avoid = sum(1 << x for x in set(avoid))
    path = avoid_path(g, a, b, avoid | sum(1 << x for x in B))
    return Fan(e, a, b, path.interior)


@dataclass(frozen=True)
class FilterNode:
    id: int
    level: int
    element: GroupElement


@dataclass(frozen=True)
class FilterEdge:
    id: int
    src: int
    dst: int
    label: int
    kind: str
    tree: bool


@dataclass(frozen=True)
class FanRecord:
    node: int
    left: int
    interior: tuple[int, ...]
    right: int


@dataclass(frozen=True)
class Loop:
    """Square above a fan: lower edges p (left) and q (right), upper edges closing at top."""
    base: int
    lower_left: int
    lower_right: int
    upper_left: int
    upper_right: int


@dataclass(frozen=True)
class Filter:
    graph: PresentationGraph
    root: int
    depth: int
    strategy: str
    nodes: tuple[FilterNode, ...]
    edges: tuple[FilterEdge, ...]
    fans: tuple[FanRecord, ...]
    loops: tuple[Loop, ...]
    levels: tuple[tuple[int, ...], ...]
    spine_left: tuple[int, ...]
    spine_right: tuple[int, ...]
    notes: tuple[str, ...] = ()

    def level(self, node: int) -> int:
        return self.nodes[node].level

    def below(self) -> list[list[int]]:
        out = [[] for _ in self.nodes]
        for e in self.edges:
            out[e.dst].append(e.id)
        return out

    def above(self) -> list[list[int]]:
        out = [[] for _ in self.nodes]
        for e in self.edges:
            out[e.src].append(e.id)
        return out

    def tree_parent(self) -> list[int | None]:
        """Tree edge beneath each node (None at the root or when missing)."""
        out: list[int | None] = [None] * len(self.nodes)
        for e in self.edges:
            if e.tree and out[e.dst] is None:
                out[e.dst] = e.id
        return out

    @cached_property
    def _parents(self) -> list[int | None]:
        return self.tree_parent()

    def tree_word(self, node: int) -> tuple[int, ...]:
        """Labels of the tree path from the root, prefixed by the root's element."""
        par = self._parents
        out = []
        while node != self.root:
            e = self.edges[par[node]]
            out.append(e.label)
            node = e.src
        return self.nodes[self.root].element.word + tuple(reversed(out))

    def structure(self):
        """Hashable summary used for round-trip comparison."""
        return (self.graph.generators, self.root, self.depth, self.strategy,
                self.nodes, self.edges, self.fans, self.loops, self.levels,
                self.spine_left, self.spine_right, self.notes)


# ---------------------------------------------------------------- building


class _Builder:
    def __init__(self, g: PresentationGraph):
        self.g = g
        self.nodes: list[FilterNode] = []
        self.edges: list[FilterEdge] = []
        self.left_up: dict[int, int] = {}
        self.right_up: dict[int, int] = {}
        self.tree_below: dict[int, int] = {}

    def node(self, level: int, element: GroupElement) -> int:
        i = len(self.nodes)
        self.nodes.append(FilterNode(i, level, element))
        return i

    def edge(self, src: int, label: int, kind: str, tree: bool) -> int:
        v = self.nodes[src]
        dst = self.node(v.level + 1, GroupElement(_append(self.g.adj, v.element.word, label)))
        i = len(self.edges)
        self.edges.append(FilterEdge(i, src, dst, label, kind, tree))
        if tree:
            self.tree_below[dst] = i
        return i

    def close(self, src: int, dst: int, label: int, kind: str, tree: bool) -> int:
        i = len(self.edges)
        self.edges.append(FilterEdge(i, src, dst, label, kind, tree))
        if tree:
            self.tree_below[dst] = i
        return i

    def tree_path(self, node: int) -> tuple[int, ...]:
        labels = []
        while node != 0:
            e = self.edges[self.tree_below[node]]
            labels.append(e.label)
            node = e.src
        return self.nodes[0].element.word + tuple(reversed(labels))


@dataclass
class _State:
    """Direction bookkeeping for the directed strategy, per off-spine node."""
    side: str
    spine_index: int
    ds: DirectionSet | None
    band: tuple[frozenset | None, frozenset | None] = (None, None)


def _mask(xs) -> int:
    return sum(1 << x for x in set(xs))


def build_filter(g: PresentationGraph, spine_left: Sequence[int], spine_right: Sequence[int],
                 shared: Sequence[int] = (), depth: int = 1, strategy: str = 'basic',
                 cfg: ThresholdConfig | None = None, max_nodes: int = 2_000_000) -> Filter:
    """Filter of the given depth rooted at the end of shared.

    basic avoids only the back set B(v) at each node v; directed also avoids
    lk(lett(A)) for the direction A selected at v.
    """
    if strategy not in ('basic', 'directed'):
        raise ValueError(f'unknown strategy {strategy!r}')
    if depth < 1:
        raise ValueError('depth must be at least 1')
    shared, sl, sr = (_letters(g, w) for w in (shared, spine_left, spine_right))
    if len(sl) < depth or len(sr) < depth:
        raise FilterError(f'spines must have length at least the depth {depth}')
    if not is_geodesic(g, shared + sl) or not is_geodesic(g, shared + sr):
        raise FilterError('spines are not geodesic')
    if sl[0] == sr[0]:
        raise FilterError('spines do not diverge after the shared geodesic')
    cfg = cfg or ThresholdConfig()
    b = _Builder(g)
    root = b.node(0, normal_form(g, shared))
    notes: list[str] = []
    cache: dict[tuple[int, int, int], tuple[int, ...]] = {}

    def path(l: int, r: int, avoid: int) -> tuple[int, ...]:
        key = (l, r, avoid)
        if key not in cache:
            cache[key] = avoid_path(g, l, r, avoid).interior
        return cache[key]

    left_nodes, right_nodes = [root], [root]
    fans: list[FanRecord] = []
    loops: list[Loop] = []
    levels: list[list[int]] = [[root]]
    star = GroupElement()
    directed = strategy == 'directed'
    spine_dirs: dict[tuple[str, int], DirectionSet | None] = {}
    state: dict[int, _State] = {}

    def spine_direction(side: str, i: int, node: int) -> DirectionSet | None:
        key = (side, i)
        if key not in spine_dirs:
            try:
                spine_dirs[key] = _reduce(g, b.nodes[node].element, star, cfg)
            except PreconditionError:
                spine_dirs[key] = None
        return spine_dirs[key]

    def choose(node: int) -> int:
        """Extra avoided generators at node under the directed strategy."""
        v = b.nodes[node]
        if v.level == 0:
            ds = spine_direction('left', 0, node)
            return _link_of(g, ds.dirs[0]) if ds else 0
        if node in spine_index:
            side, i = spine_index[node]
            ds = spine_direction(side, i, node)
            return _link_of(g, ds.dirs[0]) if ds else 0
        st = state.get(node)
        if st is None or st.ds is None:
            return 0
        return _link_of(g, _select(g, b, node, st, spine_at, spine_direction, cfg, notes))

    spine_index: dict[int, tuple[str, int]] = {}
    spine_at: dict[tuple[str, int], int] = {('left', 0): root, ('right', 0): root}

    for L in range(depth):
        nxt: list[int] = []
        for v in levels[L]:
            # spine edges are created on demand, one level at a time
            for side, nodes_, word, up, kind in (('left', left_nodes, sl, b.left_up, 'spine_left'),
                                                 ('right', right_nodes, sr, b.right_up, 'spine_right')):
                if v == nodes_[-1] and len(nodes_) == L + 1:
                    e = b.edge(v, word[L], kind, True)
                    up[v] = e
                    top = b.edges[e].dst
                    nodes_.append(top)
                    spine_index[top] = (side, L + 1)
                    spine_at[(side, L + 1)] = top
            le, re_ = b.left_up[v], b.right_up[v]
            l, r = b.edges[le].label, b.edges[re_].label
            B = _mask(back_set(g, b.nodes[v].element))
            if B >> l & 1 or B >> r & 1:
                raise FilterError(f'fan labels point back at node {v}')
            interior = None
            if directed:
                extra = choose(v)
                if extra:
                    try:
                        interior = path(l, r, B | extra)
                    except AvoidPathError:
                        notes.append(f'node {v}: directed avoidance failed, fell back to B(v)')
            if interior is None:
                interior = path(l, r, B)
            n_level = L + 1
            ints = [b.edge(v, t, 'interior', True) for t in interior]
            fans.append(FanRecord(v, le, tuple(ints), re_))
            seq = [le] + ints + [re_]
            ends = [b.edges[e].dst for e in seq]
            if nxt and nxt[-1] != ends[0]:
                raise FilterError(f'fan at node {v} does not share its left endpoint')
            nxt.extend(ends[1:] if nxt else ends)
            if directed:
                for e in seq:
                    _inherit(g, b, e, state, spine_index, spine_direction, notes, cfg)
            if L + 1 < depth:
                for pe, qe in zip(seq, seq[1:]):
                    P, Q = b.edges[pe].dst, b.edges[qe].dst
                    p, q = b.edges[pe].label, b.edges[qe].label
                    if not g.commute(p, q) or p == q:
                        raise FilterError(f'fan labels {g.generators[p]}, {g.generators[q]} do not commute')
                    ul = b.edge(P, q, 'right_fan', n_level % 2 == 0)
                    Z = b.edges[ul].dst
                    ur = b.close(Q, Z, p, 'left_fan', n_level % 2 == 1)
                    b.right_up[P] = ul
                    b.left_up[Q] = ur
                    loops.append(Loop(v, pe, qe, ul, ur))
        levels.append(nxt)
        if len(b.nodes) > max_nodes:
            raise FilterError(f'filter exceeds {max_nodes} nodes at level {L + 1}')
    if sum(map(len, levels)) != len(b.nodes):
        raise FilterError('level lists do not cover every node')
    return Filter(
        graph=g, root=root, depth=depth, strategy=strategy,
        nodes=tuple(b.nodes), edges=tuple(b.edges), fans=tuple(fans), loops=tuple(loops),
        levels=tuple(tuple(lv) for lv in levels),
        spine_left=tuple(left_nodes), spine_right=tuple(right_nodes), notes=tuple(notes),
    )


def _link_of(g: PresentationGraph, word: Sequence[int]) -> int:
    letters = set(word)
    out = g.full
    for s in letters:
        out &= g.adj[s]
    return out & ~_mask(letters) if letters else 0


def _inherit(g, b, e, state, spine_index, spine_direction, notes, cfg) -> None:
    """Propagate the direction state across edge e to its upper endpoint."""
    edge = b.edges[e]
    if not edge.tree or edge.dst in spine_index or edge.dst in state:
        return
    src = edge.src
    node = b.nodes[src]
    if src in spine_index or node.level == 0:
        side, i = spine_index.get(src, ('left', 0))
        ds = spine_direction(side, i, src)
        st = _State(side, i, ds)
    else:
        st = state.get(src)
        if st is None:
            return
    new = None
    if st.ds is not None:
        try:
            new = propagate_direction(g, st.ds, edge.label, node.element.word)
        except (PreconditionError, DirectionAmbiguityError) as exc:
            notes.append(f'node {edge.dst}: {exc}; fell back to B(v)')
    else:
        # directions start once the node is far enough from the base point
        try:
            new = _reduce(g, b.nodes[edge.dst].element, GroupElement(), cfg)
        except PreconditionError:
            new = None
    state[edge.dst] = _State(st.side, st.spine_index, new, st.band)


def _select(g, b, node, st: _State, spine_at, spine_direction, cfg, notes) -> tuple[int, ...]:
    """Direction A at an off-spine node: the four selection cases."""
    ds = st.ds
    if ds.single:
        return ds.dirs[0]
    x_node = spine_at[(st.side, st.spine_index)]
    x = b.nodes[x_node].element
    origin = spine_direction(st.side, st.spine_index, x_node)
    v = b.nodes[node].element
    k = len(x)
    rho = v.word
    wide = [0, 0]
    if origin is not None and not origin.single:
        tree = b.tree_path(node)
        try:
            d = diamond(g, (tree[:k], tree[k:]), (rho[:k], rho[k:]))
        except Exception:
            d = None
        if d is not None:
            m = normal_form(g, d.gamma1)
            W = len(d.tau1)
            for j in range(2):
                u = origin.dirs[j]
                end = multiply(g, x, u)
                if len(u) + distance(g, end, m) == distance(g, x, m):
                    wide[j] = W
    # the direction needing care is the one with larger wideness
    j = 0 if wide[0] >= wide[1] else 1
    w = wide[j]
    if w < cfg.switch_low:
        return ds.dirs[0]
    if w < cfg.switch_high:
        band = list(st.band)
        band[j] = frozenset(edge_roots(g, ds.dirs[j], ds.base))
        st.band = tuple(band)
        return ds.dirs[j]
    target = st.band[j]
    if target:
        back = tuple(reversed(v.word))
        roots = edge_roots(g, back, v)
        pos = [q for q, r in enumerate(roots) if r in target]
        if len(pos) == len(target):
            return tuple(back[q] for q in closure(g, back, pos))
        notes.append(f'node {node}: band walls not on the return geodesic, kept direction {j + 1}')
    return ds.dirs[j]


def extend_spine(g: PresentationGraph, shared: Sequence[int], spine: Sequence[int], length: int,
                 pick=min) -> tuple[int, ...]:
    """Extend spine to the given length, each step taking pick of the letters leaving the endpoint."""
    shared, spine = _letters(g, shared), _letters(g, spine)
    if not is_geodesic(g, shared + spine):
        raise FilterError('spine is not geodesic')
    e = normal_form(g, shared + spine)
    out = list(spine)
    while len(out) < length:
        nxt = [s for s in range(g.n) if s not in back_set(g, e)]
        if not nxt:
            raise FilterError('finite group: cannot extend the spine')
        s = pick(nxt)
        out.append(s)
        e = GroupElement(_append(g.adj, e.word, s))
    return tuple(out)


def default_spines(g: PresentationGraph, shared: Sequence[int], length: int,
                   first: tuple[int, int] | None = None) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Greedy spines: the least and the greatest generator that keeps the word geodesic.

    The two spines start with different letters (by default the two
    extremes of the first step) and from then on each takes its own extreme.
    """
    shared = _letters(g, shared)
    base = normal_form(g, shared)
    avail = [s for s in range(g.n) if s not in back_set(g, base)]
    if len(avail) < 2:
        raise FilterError('fewer than two ways to leave the root')
    starts = first or (avail[0], avail[-1])
    if starts[0] == starts[1] or any(s not in avail for s in starts):
        raise FilterError('spine starts must be distinct letters leaving the root')
    return (extend_spine(g, shared, (starts[0],), length, min),
            extend_spine(g, shared, (starts[1],), length, max))


# ----------------------------------------------------------------- walls


def filter_walls(f: Filter) -> list[frozenset[int]]:
    """Classes of edges joined by opposite sides of closed loops."""
    parent = list(range(len(f.edges)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for lp in f.loops:
        for a, c in ((lp.lower_left, lp.upper_right), (lp.lower_right, lp.upper_left)):
            ra, rc = find(a), find(c)
            if ra != rc:
                parent[max(ra, rc)] = min(ra, rc)
    classes: dict[int, set[int]] = {}
    for e in range(len(f.edges)):
        classes.setdefault(find(e), set()).add(e)
    return sorted((frozenset(c) for c in classes.values()), key=min)


# ------------------------------------------------------------- properties

PROPERTIES = ('1', '2', '3', '4', '5', '6', '7', 'planar', 'geodesic', 'walls')


@dataclass(frozen=True)
class FilterReport:
    results: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v is None for v in self.results.values())

    def passed(self, prop: str) -> bool:
        return self.results[prop] is None

    def lines(self) -> list[str]:
        return [f'property {k}: ' + ('ok' if v is None else f'FAIL ({v})') for k, v in self.results.items()]


def _right_is_tree(level: int) -> bool:
    """Of the two edges below a node at this level, whether the right fan edge is the tree edge."""
    return level % 2 == 1


def check_filter_properties(f: Filter) -> FilterReport:
    """Structural checks; each failing entry carries a counterexample."""
    g = f.graph
    nodes, edges = f.nodes, f.edges
    below, above = f.below(), f.above()
    fan_of = {fr.node: fr for fr in f.fans}
    res: dict[str, str | None] = {}
    spine_edges = {e.id for e in edges if e.kind in ('spine_left', 'spine_right')}

    # (1) one or two edges below each vertex; fans cover exactly the edges above
    bad = next((n.id for n in nodes if n.id != f.root and len(below[n.id]) not in (1, 2)), None)
    if bad is None and below[f.root]:
        bad = f.root
    if bad is None:
        for n in nodes:
            if n.level >= f.depth:
                if above[n.id]:
                    bad = n.id
                    break
                continue
            fr = fan_of.get(n.id)
            if fr is None or sorted([fr.left, *fr.interior, fr.right]) != sorted(above[n.id]):
                bad = n.id
                break
            if any(edges[e].src != n.id for e in (fr.left, *fr.interior, fr.right)):
                bad = n.id
                break
    res['1'] = None if bad is None else f'node {bad}'

    # (2) spine and interior edges are tree edges
    bad = next((e.id for e in edges if e.kind in ('interior', 'spine_left', 'spine_right') and not e.tree), None)
    res['2'] = None if bad is None else f'edge {bad}'

    # (3) of two edges below a vertex, one is a right fan edge (the left one) and the other a left fan edge
    bad = None
    for n in nodes:
        b = below[n.id]
        if len(b) == 2:
            kinds = sorted(edges[e].kind for e in b)
            if kinds != ['left_fan', 'right_fan']:
                bad = n.id
                break
            el = next(edges[e] for e in b if edges[e].kind == 'right_fan')
            er = next(edges[e] for e in b if edges[e].kind == 'left_fan')
            if el.tree == er.tree or el.tree != _right_is_tree(n.level):
                bad = n.id
                break
    res['3'] = None if bad is None else f'node {bad}'

    # (4) removing non-tree edges leaves a spanning tree
    bad = None
    for n in nodes:
        t = [e for e in below[n.id] if edges[e].tree]
        want = 0 if n.id == f.root else 1
        if len(t) != want:
            bad = f'node {n.id}'
            if len(t) > want:
                # name the edge whose flag breaks the level alternation
                wrong = [e for e in t if edges[e].kind in ('left_fan', 'right_fan')
                         and (edges[e].kind == 'right_fan') != _right_is_tree(n.level)]
                bad = (wrong or t)[-1]
            break
    res['4'] = None if bad is None else (f'edge {bad}' if isinstance(bad, int) else bad)

    # (5) no dead ends: every non-top vertex has a tree interior edge above it
    bad = next((n.id for n in nodes if n.level < f.depth
                and not any(edges[e].kind == 'interior' and edges[e].tree for e in above[n.id])), None)
    res['5'] = None if bad is None else f'node {bad}'

    # (6) no two consecutive off-spine tree edges of the same fan-edge kind
    par = f.tree_parent()
    bad = None
    for e in edges:
        if not e.tree or e.id in spine_edges or e.kind not in ('left_fan', 'right_fan'):
            continue
        p = par[e.src]
        if p is not None and p not in spine_edges and edges[p].kind == e.kind:
            bad = e.id
            break
    res['6'] = None if bad is None else f'edge {bad}'

    # (7) a path leaving the spine at x_i meets no filter wall of e_j, j >= i+2
    walls = filter_walls(f)
    cls = [0] * len(edges)
    for k, c in enumerate(walls):
        for e in c:
            cls[e] = k
    res['7'] = None
    for spine in (f.spine_left, f.spine_right):
        sedges = [par[x] for x in spine[1:] if par[x] is not None]
        for i in range(len(spine) - 1):
            later = {cls[e] for e in sedges[i + 1:]}
            if not later:
                continue
            block = spine[i + 1]
            seen = {spine[i]}
            stack = [spine[i]]
            hit = None
            while stack and hit is None:
                x = stack.pop()
                for e in above[x]:
                    y = edges[e].dst
                    if y == block:
                        continue
                    if cls[e] in later:
                        hit = e
                        break
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            if hit is not None:
                res['7'] = f'edge {hit} from spine node {spine[i]}'
                break
        if res['7']:
            break

    # extra structural checks
    bad = None
    for fr in f.fans:
        ends = [edges[e].dst for e in (fr.left, *fr.interior, fr.right)]
        if len(set(ends)) != len(ends):
            bad = fr.node
            break
    if bad is None:
        for L in range(f.depth):
            seq = []
            for v in f.levels[L]:
                if v not in fan_of:
                    continue
                fr = fan_of[v]
                ends = [edges[e].dst for e in (fr.left, *fr.interior, fr.right)]
                if seq and seq[-1] != ends[0]:
                    bad = v
                    break
                seq.extend(ends[1:] if seq else ends)
            if bad is not None:
                break
            if seq != list(f.levels[L + 1]):
                bad = f'level {L + 1}'
                break
    res['planar'] = None if bad is None else (f'node {bad}' if isinstance(bad, int) else bad)

    bad = None
    words: dict[int, tuple[int, ...]] = {f.root: nodes[f.root].element.word}
    for lv in f.levels[1:]:
        for v in lv:
            p = par[v]
            if p is None or edges[p].src not in words:
                bad = v
                break
            w = words[edges[p].src] + (edges[p].label,)
            words[v] = w
            if not is_geodesic(g, w) or len(w) != len(nodes[v].element):
                bad = v
                break
        if bad is not None:
            break
    res['geodesic'] = None if bad is None else f'node {bad}'

    bad = None
    root_of: dict[int, tuple[int, ...]] = {}
    cols = {f.root: _matrix(g, nodes[f.root].element.word)}
    for L, lv in enumerate(f.levels):
        for v in lv:
            if v not in cols:
                continue
            for e in above[v]:
                edge = edges[e]
                r = _normalize(cols[v][edge.label])
                if root_of.setdefault(cls[e], r) != r or \
                        _append(g.adj, nodes[v].element.word, edge.label) != nodes[edge.dst].element.word:
                    bad = e
                    break
            if bad is not None:
                break
        if bad is not None or L + 1 >= len(f.levels):
            break
        nxt = {}
        for v in f.levels[L + 1]:
            p = par[v]
            if p is None or edges[p].src not in cols:
                continue
            c = [list(col) for col in cols[edges[p].src]]
            _right_mul(g, c, edges[p].label)
            nxt[v] = c
        cols = nxt
    res['walls'] = None if bad is None else f'edge {bad}'
    return FilterReport(res)


# ---------------------------------------------------------------- export


def export_filter(f: Filter, fmt: str = 'json') -> str:
    g = f.graph
    if fmt == 'json':
        doc = {
            'generators': list(g.generators),
            'edges_of_graph': [list(e) for e in g.edge_list()],
            'strategy': f.strategy,
            'depth': f.depth,
            'root': f.root,
            'nodes': [{'id': n.id, 'level': n.level, 'element': [g.generators[s] for s in n.element.word]}
                      for n in f.nodes],
            'edges': [{'id': e.id, 'from': e.src, 'to': e.dst, 'label': g.generators[e.label],
                       'kind': e.kind, 'tree': e.tree} for e in f.edges],
            'fans': [{'node': fr.node, 'left': fr.left, 'interior': list(fr.interior), 'right': fr.right}
                     for fr in f.fans],
            'loops': [[lp.base, lp.lower_left, lp.lower_right, lp.upper_left, lp.upper_right] for lp in f.loops],
            'levels': [list(lv) for lv in f.levels],
            'spine_left': list(f.spine_left),
            'spine_right': list(f.spine_right),
            'notes': list(f.notes),
        }
        return json.dumps(doc, indent=1, ensure_ascii=False) + '\n'
    if fmt == 'dot':
        pos = {}
        for L, lv in enumerate(f.levels):
            for k, v in enumerate(lv):
                pos[v] = f'n{L}_{k}'
        lines = ['graph F {']
        for lv in f.levels:
            for v in lv:
                word = ' '.join(g.generators[s] for s in f.nodes[v].element.word)
                lines.append(f'  {pos[v]} [label="{word}"];')
        for e in f.edges:
            attrs = f'label="{g.generators[e.label]}"'
            if not e.tree:
                attrs += ', style=dashed'
            lines.append(f'  {pos[e.src]} -- {pos[e.dst]} [{attrs}];')
        lines.append('}')
        return '\n'.join(lines) + '\n'
    raise ValueError(f'unknown export format {fmt!r}')


def filter_from_json(text: str) -> Filter:
    doc = json.loads(text)
    g = PresentationGraph.from_edges(doc['generators'], [tuple(e) for e in doc['edges_of_graph']])
    idx = g.index
    nodes = tuple(FilterNode(n['id'], n['level'], GroupElement(tuple(idx[x] for x in n['element'])))
                  for n in doc['nodes'])
    edges = tuple(FilterEdge(e['id'], e['from'], e['to'], idx[e['label']], e['kind'], e['tree'])
                  for e in doc['edges'])
    fans = tuple(FanRecord(fr['node'], fr['left'], tuple(fr['interior']), fr['right']) for fr in doc['fans'])
    loops = tuple(Loop(*lp) for lp in doc['loops'])
    return Filter(g, doc['root'], doc['depth'], doc['strategy'], nodes, edges, fans, loops,
                  tuple(tuple(lv) for lv in doc['levels']), tuple(doc['spine_left']),
                  tuple(doc['spine_right']), tuple(doc['notes']))
