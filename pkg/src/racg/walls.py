"""Walls of the Cayley graph, diamonds for geodesic bigons, back combings
and directions toward a base point.

A wall is identified by its reflection: the edge (v, s) lies in the wall of
v s v^-1, and two edges lie in the same wall exactly when their
reflections agree.  Positions along a geodesic word correspond one to one
with the walls it crosses, so most of the constructions below reduce to
order ideals in the dependency order of a single geodesic word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .presentation import PresentationGraph, find_visual_z2z2_power
from .words import (
    GroupElement, InvalidGeneratorError, append, back_set, distance, inverse,
    is_geodesic, multiply, normal_form, _letters,
)

__all__ = [
    'EdgeRef', 'Wall', 'Diamond', 'BackCombing', 'ThresholdConfig', 'DirectionSet',
    'HypothesisViolation', 'PreconditionError', 'DirectionAmbiguityError', 'DiamondError',
    'wall_of', 'same_wall', 'path_walls', 'edge_roots', 'canonical_edge', 'walls_cross',
    'closure', 'shortest_hitting_walls', 'diamond', 'check_diamond',
    'back_combing', 'reduce_directions', 'propagate_direction',
]


class HypothesisViolation(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class DirectionAmbiguityError(RuntimeError):
    pass


class DiamondError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class EdgeRef:
    base: GroupElement
    label: int


@dataclass(frozen=True, order=True)
class Wall:
    reflection: GroupElement


def wall_of(g: PresentationGraph, e: EdgeRef) -> Wall:
    v = e.base.word
    return Wall(normal_form(g, v + (e.label,) + tuple(reversed(v))))


def same_wall(g: PresentationGraph, e1: EdgeRef, e2: EdgeRef) -> bool:
    return e1.label == e2.label and wall_of(g, e1) == wall_of(g, e2)


def path_walls(g: PresentationGraph, word: Sequence[int], start: GroupElement | None = None) -> list[Wall]:
    """Wall of each edge along the path spelled by word from start."""
    v = start if start is not None else GroupElement()
    out = []
    for s in _letters(g, word):
        out.append(wall_of(g, EdgeRef(v, s)))
        v = append(g, v, s)
    return out


def _matrix(g: PresentationGraph, word: Sequence[int]) -> list[list[int]]:
    """Columns of the geometric representation matrix of the element spelled by word."""
    n = g.n
    cols = [[int(i == j) for i in range(n)] for j in range(n)]
    for a in word:
        _right_mul(g, cols, a)
    return cols


def _right_mul(g: PresentationGraph, cols: list[list[int]], a: int) -> None:
    ca = cols[a]
    for t in range(g.n):
        if t == a:
            cols[a] = [-x for x in ca]
        elif not g.adj[a] >> t & 1:
            ct = cols[t]
            cols[t] = [x + 2 * y for x, y in zip(ct, ca)]


def _normalize(root: list[int]) -> tuple[int, ...]:
    for x in root:
        if x:
            return tuple(root) if x > 0 else tuple(-y for y in root)
    raise ValueError('zero root')


def edge_roots(g: PresentationGraph, word: Sequence[int], start: GroupElement | None = None) -> list[tuple[int, ...]]:
    """A wall key for each edge of the path spelled by word from start.

    The edge (v, s) is keyed by the root v(e_s) of the geometric
    representation up to sign; two edges share a wall exactly when their
    keys agree.
    """
    cols = _matrix(g, start.word if start is not None else ())
    out = []
    for a in word:
        out.append(_normalize(cols[a]))
        _right_mul(g, cols, a)
    return out


def canonical_edge(g: PresentationGraph, w: Wall) -> EdgeRef:
    """The edge where the normal-form path to the reflection crosses the wall."""
    r = w.reflection.word
    v = GroupElement()
    for s in r:
        e = EdgeRef(v, s)
        if wall_of(g, e) == w:
            return e
        v = append(g, v, s)
    raise ValueError('not a reflection')


def _carrier_hits(g: PresentationGraph, w1: Wall, w2: Wall, radius: int) -> bool:
    e = canonical_edge(g, w1)
    s = e.label
    link = [t for t in range(g.n) if t != s and g.commute(s, t)]
    frontier = [GroupElement()]
    seen = {GroupElement()}
    for depth in range(radius + 1):
        nxt = []
        for x in frontier:
            u = multiply(g, e.base, x.word)
            for t in link:
                if wall_of(g, EdgeRef(u, t)) == w2:
                    return True
            if depth < radius:
                for t in link:
                    y = append(g, x, t)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
        frontier = nxt
    return False


def walls_cross(g: PresentationGraph, w1: Wall, w2: Wall, radius: int) -> bool:
    """Search for a square with two sides in each wall.

    Squares containing an edge of w1 sit on its carrier v·<lk(s)>, so only
    carrier vertices within radius of the canonical edge are tried (and
    symmetrically for w2).  True is definitive; False means not found.
    """
    if w1 == w2:
        raise ValueError('walls must be distinct')
    return _carrier_hits(g, w1, w2, radius) or _carrier_hits(g, w2, w1, radius)


def closure(g: PresentationGraph, word: Sequence[int], positions: Iterable[int]) -> list[int]:
    """Down-closure of positions in the dependency order of word."""
    pos = set(positions)
    if not pos:
        return []
    adj = g.adj
    need = 0
    out = []
    for q in range(max(pos), -1, -1):
        x = word[q]
        if q in pos or need & ~adj[x]:
            out.append(q)
            need |= 1 << x
    return out[::-1]


def shortest_hitting_walls(g: PresentationGraph, gamma: Sequence[int], targets: Iterable[int]) -> tuple[int, ...]:
    """Shortest path from the start of gamma containing an edge in each targeted wall."""
    gamma = _letters(g, gamma)
    if not is_geodesic(g, gamma):
        raise ValueError('gamma is not geodesic')
    targets = set(targets)
    for i in targets:
        if type(i) is not int or not 0 <= i < len(gamma):
            raise IndexError(f'edge index {i!r} out of range')
    return tuple(gamma[q] for q in closure(g, gamma, targets))


@dataclass(frozen=True)
class Diamond:
    gamma1: tuple[int, ...]
    tau1: tuple[int, ...]
    delta1: tuple[int, ...]
    delta2: tuple[int, ...]
    tau2: tuple[int, ...]
    gamma2: tuple[int, ...]
    anchor: GroupElement

    @property
    def down(self) -> tuple[int, ...]:
        """Down edge path at the anchor: tau1 traversed backwards."""
        return tuple(reversed(self.tau1))


def _split(g: PresentationGraph, word: tuple[int, ...], keep: set[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    inside = tuple(word[i] for i in range(len(word)) if i in keep)
    outside = tuple(word[i] for i in range(len(word)) if i not in keep)
    return inside, outside


def diamond(g: PresentationGraph, p1: tuple[Sequence[int], Sequence[int]], p2: tuple[Sequence[int], Sequence[int]]) -> Diamond:
    a1, a2 = (_letters(g, w) for w in p1)
    b1, b2 = (_letters(g, w) for w in p2)
    if not is_geodesic(g, a1 + a2) or not is_geodesic(g, b1 + b2):
        raise DiamondError('non-geodesic input')
    if len(a1) != len(b1):
        raise DiamondError('split points at different distances')
    if normal_form(g, a1 + a2) != normal_form(g, b1 + b2):
        raise DiamondError('unequal endpoints')
    x1 = normal_form(g, a1)
    x2 = normal_form(g, b1)
    wa = edge_roots(g, a1)
    wb = set(edge_roots(g, b1))
    shared = {i for i, w in enumerate(wa) if w in wb}
    if set(closure(g, a1, shared)) != shared:
        raise RuntimeError('shared walls do not form a prefix')
    gamma1, tau1 = _split(g, a1, shared)
    wa_set = set(wa)
    _, delta1 = _split(g, b1, {i for i, w in enumerate(edge_roots(g, b1)) if w in wa_set})
    ua = edge_roots(g, a2, x1)
    ub = set(edge_roots(g, b2, x2))
    top = {i for i, w in enumerate(ua) if w in ub}
    low = set(range(len(a2))) - top
    if set(closure(g, a2, low)) != low:
        raise RuntimeError('unshared upper walls do not form a prefix')
    gamma2, lower = _split(g, a2, top)
    z = multiply(g, x1, delta1)
    if multiply(g, x1, lower) != z or multiply(g, x2, tau1) != z:
        raise RuntimeError('upper half does not close up')
    return Diamond(gamma1, tau1, delta1, delta1, tau1, gamma2, x1)


def check_diamond(g: PresentationGraph, p1, p2, d: Diamond) -> list[str]:
    """Names of the violated diamond invariants (empty when all hold)."""
    a1, a2 = (tuple(w) for w in p1)
    b1, b2 = (tuple(w) for w in p2)
    x1, x2 = normal_form(g, a1), normal_form(g, b1)
    y = normal_form(g, a1 + a2)
    bad = []
    if not (is_geodesic(g, d.gamma1 + d.tau1) and normal_form(g, d.gamma1 + d.tau1) == x1
            and is_geodesic(g, d.gamma1 + d.delta1) and normal_form(g, d.gamma1 + d.delta1) == x2):
        bad.append('lower')
    if not (is_geodesic(g, x1.word + d.delta2 + d.gamma2) and multiply(g, x1, d.delta2 + d.gamma2) == y
            and is_geodesic(g, x2.word + d.tau2 + d.gamma2) and multiply(g, x2, d.tau2 + d.gamma2) == y):
        bad.append('upper')
    if d.tau1 != d.tau2:
        bad.append('tau_labels')
    if d.delta1 != d.delta2:
        bad.append('delta_labels')
    lt, ld = set(d.tau1), set(d.delta1)
    if lt & ld or any(not g.commute(s, t) for s in lt for t in ld):
        bad.append('commute')
    if not (is_geodesic(g, tuple(reversed(d.tau1)) + d.delta1)
            and is_geodesic(g, d.delta2 + tuple(reversed(d.tau2)))):
        bad.append('cross')
    return bad


@dataclass(frozen=True)
class BackCombing:
    source: GroupElement
    target: GroupElement
    segments: tuple[tuple[int, ...], ...]

    @property
    def word(self) -> tuple[int, ...]:
        return tuple(s for seg in self.segments for s in seg)


def back_combing(g: PresentationGraph, source: GroupElement, target: GroupElement) -> BackCombing:
    """Repeatedly traverse the whole clique of letters pointing back to target."""
    h = multiply(g, inverse(g, target), source.word)
    segments = []
    while h.word:
        seg = tuple(sorted(back_set(g, h)))
        segments.append(seg)
        h = multiply(g, h, seg)
    return BackCombing(source, target, tuple(segments))


@dataclass(frozen=True)
class ThresholdConfig:
    """Integer thresholds of the direction machinery.

    far: minimum distance to the base point (7N^2); r0: starting combing
    segment (7N); shared: wall count identifying two directions (6N-3);
    switch_low / switch_high: wideness band of the direction switch
    (20N^2 and 21N^2 with unit hyperbolicity constant).
    """
    far: int = 6
    r0: int = 3
    shared: int = 2
    switch_low: int = 4
    switch_high: int = 6

    @classmethod
    def unscaled(cls, n: int) -> 'ThresholdConfig':
        return cls(far=7 * n * n, r0=7 * n, shared=6 * n - 3,
                   switch_low=20 * n * n, switch_high=21 * n * n)

    @classmethod
    def scaled(cls) -> 'ThresholdConfig':
        return cls()


@dataclass(frozen=True)
class DirectionSet:
    base: GroupElement
    star: GroupElement
    dirs: tuple[tuple[int, ...], ...]
    cfg: ThresholdConfig = field(default_factory=ThresholdConfig)
    final_r: int = 0
    notes: tuple[str, ...] = ()

    @property
    def single(self) -> bool:
        return len(self.dirs) == 1

    def walls(self, g: PresentationGraph, k: int) -> list[Wall]:
        return path_walls(g, self.dirs[k], self.base)

    def roots(self, g: PresentationGraph, k: int) -> list[tuple[int, ...]]:
        return edge_roots(g, self.dirs[k], self.base)


def _require_hypothesis(g: PresentationGraph) -> None:
    pairs = find_visual_z2z2_power(g, 3)
    if pairs is not None:
        raise HypothesisViolation(f'visual (Z2*Z2)^3 on pairs {pairs}')


def _reduce(g: PresentationGraph, x: GroupElement, star: GroupElement, cfg: ThresholdConfig) -> DirectionSet:
    if distance(g, x, star) <= cfg.far:
        raise PreconditionError(f'base point within distance {cfg.far} of the target')
    comb = back_combing(g, x, star)
    if len(comb.segments) <= cfg.r0:
        raise PreconditionError(f'back combing has {len(comb.segments)} segments, need more than {cfg.r0}')
    word = comb.word
    seg_of = []
    for k, seg in enumerate(comb.segments, 1):
        seg_of += [k] * len(seg)
    seg_pos = {}
    for q, k in enumerate(seg_of):
        seg_pos.setdefault(k, []).append(q)

    def ideal(p: int) -> frozenset[int]:
        return frozenset(closure(g, word, [p]))

    # each direction is (anchor position, ideal of positions)
    dirs = [(p, ideal(p)) for p in seg_pos[cfg.r0 + 1]]
    R = cfg.r0
    while R >= 1:
        row = seg_pos[R]
        hit = None
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                common = [a for a in row if a in dirs[i][1] and a in dirs[j][1]]
                if common:
                    hit = (i, j, common[0])
                    break
            if hit:
                break
        if hit is None:
            break
        i, j, a = hit
        nxt = []
        for ell, (u, I) in enumerate(dirs):
            if ell == j:
                continue
            if ell == i:
                nxt.append((a, ideal(a)))
                continue
            b = next((q for q in row if q in I), None)
            if b is None:
                raise RuntimeError('direction misses the combing segment')
            nxt.append((b, ideal(b)))
        dirs = []
        for u, I in nxt:
            if all(u != v for v, _ in dirs):
                dirs.append((u, I))
        R -= 1
    notes = []
    if len(dirs) == 2:
        common = sorted(dirs[0][1] & dirs[1][1])
        unrelated = any(not g.commute(word[p], word[q]) for p in common for q in common if p < q)
        if unrelated:
            end1 = multiply(g, x, [word[q] for q in sorted(dirs[0][1])])
            sub = back_combing(g, x, end1)
            pos_of = {w: q for q, w in enumerate(edge_roots(g, word, x))}
            roots = iter(edge_roots(g, sub.word, x))
            sub_walls = [[pos_of[next(roots)] for _ in seg] for seg in sub.segments]
            order = [1] + [k for k in range(len(sub_walls)) if k != 1]
            pick = None
            for k in order:
                if k >= len(sub_walls):
                    continue
                pick = next((q for q in sub_walls[k] if q in dirs[0][1] and q in dirs[1][1]), None)
                if pick is not None:
                    if k != 1:
                        notes.append(f'merge edge taken from combing segment {k + 1}')
                    break
            dirs = [(pick, ideal(pick))]
    out = tuple(tuple(word[q] for q in sorted(I)) for _, I in dirs)
    return DirectionSet(x, star, out, cfg, R, tuple(notes))


def reduce_directions(g: PresentationGraph, x: GroupElement, star: GroupElement,
                      cfg: ThresholdConfig | None = None) -> DirectionSet:
    """At most two directions at x in which geodesics toward star can diverge."""
    _require_hypothesis(g)
    return _reduce(g, x, star, cfg or ThresholdConfig())


def propagate_direction(g: PresentationGraph, ds: DirectionSet, ell: int, context: Sequence[int]) -> DirectionSet:
    """Directions at base·ell, corresponded to those at base.

    context is a geodesic word from star to ds.base.
    """
    if type(ell) is not int or not 0 <= ell < g.n:
        raise InvalidGeneratorError(f'invalid generator index {ell!r}')
    context = _letters(g, context)
    if not is_geodesic(g, context + (ell,)):
        raise ValueError('context followed by ell is not geodesic')
    v = append(g, ds.base, ell)
    if ds.single:
        u = ds.dirs[0]
        if all(g.commute(ell, s) and ell != s for s in u):
            return DirectionSet(v, ds.star, (u,), ds.cfg, ds.final_r)
        return DirectionSet(v, ds.star, ((ell,) + u,), ds.cfg, ds.final_r)
    new = _reduce(g, v, ds.star, ds.cfg)
    if new.single:
        return new
    old = [set(ds.roots(g, k)) for k in range(2)]
    cand = [set(new.roots(g, k)) for k in range(2)]
    counts = [[len(o & c) for c in cand] for o in old]
    th = ds.cfg.shared
    hits = [[b for b in range(2) if counts[k][b] >= th] for k in range(2)]
    for k in range(2):
        if len(hits[k]) == 2:
            raise DirectionAmbiguityError(f'direction {k + 1} shares {counts[k]} walls with both candidates')
    if hits[0] and hits[1] and hits[0] == hits[1]:
        raise DirectionAmbiguityError(f'both directions match the same candidate: {counts}')
    if hits[0]:
        swap = hits[0][0] == 1
    elif hits[1]:
        swap = hits[1][0] == 0
    else:
        keep, cross = counts[0][0] + counts[1][1], counts[0][1] + counts[1][0]
        if keep == cross:
            raise DirectionAmbiguityError(f'shared wall counts {counts} do not separate the directions')
        swap = cross > keep
    dirs = new.dirs[::-1] if swap else new.dirs
    return DirectionSet(v, ds.star, dirs, ds.cfg, new.final_r, new.notes)
