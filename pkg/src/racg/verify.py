"""Lemma verification suites on finite Cayley balls.

Every suite compares the word calculus against the oracle, or checks a
stated property exhaustively within the given bounds.  Instances are
enumerated in a fixed order and sampling uses random.Random(seed), so a
report depends only on its inputs.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .filters import AvoidPathError, FilterError, avoid_path, build_filter, check_filter_properties, default_spines
from .oracle import LEMMAS, BallCapExceeded, CayleyBall, ball, oracle_geodesics, oracle_wall
from .presentation import PresentationGraph, ends_class, find_virtual_factor_separator, find_visual_z2z2_power
from .walls import (
    EdgeRef, PreconditionError, ThresholdConfig, _reduce, back_combing, check_diamond,
    diamond, edge_roots, shortest_hitting_walls, wall_of,
)
from .words import (
    GroupElement, back_set, deletable_pair, is_geodesic, lett, normal_form,
)

__all__ = ['Report', 'run_suite', 'run_all', 'DEFAULTS', 'UnknownLemmaError']

MAX_FAILURES = 20

DEFAULTS = {
    'sameletters': {'radius': 6},
    'deletion': {'length': 8},
    'finiteback': {'radius': 6},
    'radel': {'radius': 6},
    'differentletters': {'length': 8},
    'wallprops': {'radius': 4},
    'shortback': {'radius': 5},
    'diamond': {'radius': 6},
    'doublediamond': {'radius': 20},
    'backprops': {'radius': 6},
    'twodir': {'radius': 9},
    'avoidlink': {'radius': 5},
    'filterprops': {'depth': 8},
}


class UnknownLemmaError(ValueError):
    pass


@dataclass
class Report:
    lemma: str
    params: dict
    instances: int = 0
    failures: list[str] = field(default_factory=list)
    failure_count: int = 0
    skipped: int = 0
    notes: list[str] = field(default_factory=list)
    aborted: str | None = None
    seconds: float = 0.0

    def fail(self, msg: str) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_FAILURES:
            self.failures.append(msg)

    @property
    def ok(self) -> bool:
        return self.failure_count == 0 and self.aborted is None

    def text(self, timing: bool = False) -> str:
        params = ' '.join(f'{k}={v}' for k, v in sorted(self.params.items()))
        lines = [f'{self.lemma} ({params}): {self.instances} instances, {self.failure_count} failures']
        if self.aborted:
            lines.append(f'  aborted: {self.aborted}')
        if self.skipped:
            lines.append(f'  skipped {self.skipped} instances outside the hypotheses')
        lines += [f'  note: {n}' for n in self.notes]
        lines += [f'  FAIL {f}' for f in self.failures]
        if timing:
            lines.append(f'  {self.seconds:.2f} s')
        return '\n'.join(lines) + '\n'

    def to_json(self, timing: bool = False) -> dict:
        doc = {'lemma': self.lemma, 'params': self.params, 'instances': self.instances,
               'failures': self.failures, 'failure_count': self.failure_count,
               'skipped': self.skipped, 'notes': self.notes, 'aborted': self.aborted}
        if timing:
            doc['seconds'] = round(self.seconds, 3)
        return doc


@lru_cache(maxsize=8)
def _ball(g: PresentationGraph, radius: int) -> CayleyBall:
    return ball(g, radius)


def _dist(b: CayleyBall, w) -> int:
    i = b.lookup(tuple(w))
    if i is None:
        raise LookupError('word outside the oracle ball')
    return int(b.layer[i])


def _name(g: PresentationGraph, w) -> str:
    return '[' + ' '.join(g.generators[s] for s in w) + ']'


def _words(n: int, length: int, rng: random.Random, samples: int):
    """All words of length up to length when few enough, else a fixed sample."""
    total = sum(n ** k for k in range(length + 1))
    if total <= samples:
        for k in range(length + 1):
            yield from itertools.product(range(n), repeat=k)
        return
    for _ in range(samples):
        k = rng.randint(0, length)
        yield tuple(rng.randrange(n) for _ in range(k))


# ------------------------------------------------------------------ suites


def _sameletters(g, rep, radius, cap=64, **_):
    b = _ball(g, radius)
    for i, w in enumerate(b.canonical):
        back = b.back_labels(i)
        L = len(w)
        geos = oracle_geodesics(b, i, cap)
        for u in geos:
            rep.instances += 1
            if len(u) != L or lett(u) != lett(w):
                rep.fail(f'{_name(g, u)} vs {_name(g, w)}: length or letters differ')
            ub = frozenset(s for s in range(g.n) if not is_geodesic(g, u + (s,)))
            if ub != back:
                rep.fail(f'{_name(g, u)}: back set {sorted(ub)} vs oracle {sorted(back)}')
        if back_set(g, normal_form(g, w)) != back:
            rep.fail(f'{_name(g, w)}: back_set disagrees with the oracle')


def _finiteback(g, rep, radius, **_):
    b = _ball(g, radius)
    for i in range(len(b)):
        rep.instances += 1
        back = sorted(b.back_labels(i))
        if any(not g.commute(s, t) for s in back for t in back):
            rep.fail(f'{_name(g, b.word(i))}: back set {back} is not a clique')
        if frozenset(back) != back_set(g, GroupElement(b.word(i))):
            rep.fail(f'{_name(g, b.word(i))}: back_set disagrees with the oracle')


def _deletion(g, rep, length, seed, samples=20000, **_):
    b = _ball(g, length)
    rng = random.Random(seed)
    for w in _words(g.n, length, rng, samples):
        rep.instances += 1
        d = _dist(b, w)
        pair = deletable_pair(g, w)
        if d == len(w):
            if pair is not None:
                rep.fail(f'{_name(g, w)} is geodesic but {pair} was reported')
            continue
        if pair is None:
            rep.fail(f'{_name(g, w)} is not geodesic but no deletable pair was found')
            continue
        i, j = pair
        if w[i] != w[j]:
            rep.fail(f'{_name(g, w)}: deleting letters {i}, {j} which differ')
        short = w[:i] + w[i + 1:j] + w[j + 1:]
        if b.lookup(short) != b.lookup(w):
            rep.fail(f'{_name(g, w)}: deleting {i}, {j} changes the element')


def _radel(g, rep, radius, **_):
    b = _ball(g, radius)
    for i, w in enumerate(b.canonical):
        if len(w) == radius:
            continue
        for s in range(g.n):
            if b.nbr[i, s] < 0 or b.layer[b.nbr[i, s]] > b.layer[i]:
                continue
            rep.instances += 1
            last = max((k for k, x in enumerate(w) if x == s), default=None)
            if last is None:
                rep.fail(f'{_name(g, w)} + {g.generators[s]}: no earlier {g.generators[s]}')
                continue
            if any(not g.commute(s, x) for x in w[last + 1:]):
                rep.fail(f'{_name(g, w)} + {g.generators[s]}: letters after the last occurrence do not commute')
            if b.lookup(w[:last] + w[last + 1:]) != b.nbr[i, s]:
                rep.fail(f'{_name(g, w)} + {g.generators[s]}: deletion pair is wrong')


def _differentletters(g, rep, length, seed, samples=2000, **_):
    b = _ball(g, length)
    rng = random.Random(seed)
    for _ in range(samples):
        u_set = [s for s in range(g.n) if rng.random() < 0.5]
        v_set = [s for s in range(g.n) if s not in u_set]
        if not u_set or not v_set:
            continue
        k = rng.randint(0, length)
        u = normal_form(g, [rng.choice(u_set) for _ in range(rng.randint(0, k))]).word
        v = normal_form(g, [rng.choice(v_set) for _ in range(rng.randint(0, length - len(u)))]).word
        rep.instances += 1
        if _dist(b, u + v) != len(u) + len(v):
            rep.fail(f'{_name(g, u)} {_name(g, v)} is not geodesic')


def _wallprops(g, rep, radius, seed, samples=300, **_):
    b = _ball(g, radius)
    words = b.canonical
    inner = [i for i in range(len(b)) if b.layer[i] < radius]
    edges = [(i, s) for i in inner for s in range(g.n) if b.layer[b.nbr[i, s]] > b.layer[i]]
    rng = random.Random(seed)
    picked = edges if len(edges) <= samples else sorted(rng.sample(edges, samples))
    key = {}
    for i, s in edges:
        key[(i, s)] = wall_of(g, EdgeRef(GroupElement(words[i]), s))
    for i, s in picked:
        rep.instances += 1
        e = EdgeRef(GroupElement(words[i]), s)
        cls = oracle_wall(b, e)
        if any(t != s for _, t in cls):
            rep.fail(f'wall of ({_name(g, words[i])}, {g.generators[s]}) has mixed labels')
        mates = sorted(k for k in edges if key[k] == key[(i, s)])
        if mates != cls:
            rep.fail(f'wall of ({_name(g, words[i])}, {g.generators[s]}): oracle and wall_of disagree')
        # equivalence: the class seen from any member is the same
        j, t = cls[-1]
        if oracle_wall(b, EdgeRef(GroupElement(words[j]), t)) != cls:
            rep.fail(f'wall of ({_name(g, words[i])}, {g.generators[s]}) is not an equivalence class')
    # same wall along a path iff the two letters delete
    for _ in range(samples):
        k = rng.randint(2, radius)
        w = tuple(rng.randrange(g.n) for _ in range(k))
        ws = edge_roots(g, w)
        rep.instances += 1
        deleting = set()
        for p in range(k):
            for q in range(p + 1, k):
                short = w[:p] + w[p + 1:q] + w[q + 1:]
                if b.lookup(short) == b.lookup(w):
                    deleting.add((p, q))
        same = {(p, q) for p in range(k) for q in range(p + 1, k) if ws[p] == ws[q]}
        if same != deleting:
            rep.fail(f'{_name(g, w)}: same-wall pairs {sorted(same)} vs deleting pairs {sorted(deleting)}')
        if (not same) != (_dist(b, w) == k):
            rep.fail(f'{_name(g, w)}: geodesic iff walls distinct fails')
    # geodesics with common endpoints cross the same walls
    for i in range(len(b)):
        geos = oracle_geodesics(b, i, 8)
        if len(geos) < 2:
            continue
        rep.instances += 1
        sets = {frozenset(edge_roots(g, u)) for u in geos}
        if len(sets) != 1:
            rep.fail(f'geodesics to {_name(g, words[i])} cross different walls')


def _bigons(b: CayleyBall, cap: int):
    """(y index, word pair) for distinct oracle geodesics with the same endpoints."""
    for i in range(len(b)):
        geos = oracle_geodesics(b, i, cap)
        for p, q in itertools.combinations(geos, 2):
            yield i, p, q


def _shortback(g, rep, radius, cap=6, **_):
    b = _ball(g, 2 * radius)
    small = _ball(g, radius)
    seen = set()
    for i, p, q in _bigons(small, cap):
        for gamma in (p, q):
            if gamma in seen:
                continue
            seen.add(gamma)
            L = len(gamma)
            for k in range(1, min(3, L) + 1):
                for A in itertools.combinations(range(L), k):
                    rep.instances += 1
                    tau = shortest_hitting_walls(g, gamma, A)
                    ys = b.lookup(tuple(reversed(tau)) + gamma)
                    if len(tau) + int(b.layer[ys]) != L:
                        rep.fail(f'{_name(g, gamma)} A={A}: tau {_name(g, tau)} does not extend geodesically')
                    roots = set(edge_roots(g, tau))
                    gr = edge_roots(g, gamma)
                    if any(gr[a] not in roots for a in A):
                        rep.fail(f'{_name(g, gamma)} A={A}: tau misses a wall')
                    if not is_geodesic(g, tau):
                        rep.fail(f'{_name(g, gamma)} A={A}: tau is not geodesic')


def _diamond(g, rep, radius, cap=8, **_):
    b = _ball(g, radius)
    for i, p, q in _bigons(b, cap):
        for k in range(1, len(p)):
            rep.instances += 1
            p1, p2 = (p[:k], p[k:]), (q[:k], q[k:])
            try:
                d = diamond(g, p1, p2)
            except Exception as exc:
                rep.fail(f'{_name(g, p)} / {_name(g, q)} at {k}: {exc}')
                continue
            bad = check_diamond(g, p1, p2, d)
            # oracle side: the square closes and the halves have matching length
            if b.lookup(d.gamma1 + d.tau1) != b.lookup(p[:k]) or b.lookup(d.gamma1 + d.delta1) != b.lookup(q[:k]):
                bad.append('oracle_lower')
            if len(d.tau1) != len(d.delta1):
                bad.append('square')
            if bad:
                rep.fail(f'{_name(g, p)} / {_name(g, q)} at {k}: {",".join(bad)}')


def _doublediamond(g, rep, radius, **_):
    """Triples of split points on geodesics between the identity and b.

    The lower half of a diamond at x1 depends only on the split points x1
    and x2, so the down path nu_12 is cached per point pair.
    """
    N = g.n
    if find_visual_z2z2_power(g, 3) is not None:
        rep.notes.append('graph contains a visual (Z2*Z2)^3; hypothesis fails')
        return
    big = _ball(g, 2 * radius)
    small = _ball(g, radius)
    words = small.canonical
    layer = small.layer
    inv = {}

    def dist(i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        if key not in inv:
            inv[key] = int(big.layer[big.lookup(tuple(reversed(words[i])) + words[j])])
        return inv[key]

    nu: dict[tuple[int, int], tuple[int, frozenset]] = {}
    nonadj = [(s, t) for s in range(N) for t in range(s + 1, N) if not g.commute(s, t)]
    for y in range(len(small)):
        n = int(layer[y])
        for k in range(1, n):
            pts = [x for x in np.nonzero(layer == k)[0] if dist(int(x), y) == n - k]
            pts = [int(x) for x in pts]
            if len(pts) < 2:
                continue
            for x1 in pts:
                cand = []
                for x2 in pts:
                    if x2 == x1 or dist(x1, x2) < 4 * N:
                        continue
                    if (x1, x2) not in nu:
                        a1, b1 = words[x1], words[x2]
                        a2 = normal_form(g, tuple(reversed(a1)) + words[y]).word
                        b2 = normal_form(g, tuple(reversed(b1)) + words[y]).word
                        d = diamond(g, (a1, a2), (b1, b2))
                        nu[(x1, x2)] = (len(d.down), frozenset(d.down))
                    length, letters = nu[(x1, x2)]
                    if length < 2 * N:
                        continue
                    if not any(s in letters and t in letters for s, t in nonadj):
                        continue
                    cand.append((x2, length, letters))
                for (x2, l2, s2), (x3, l3, s3) in itertools.product(cand, repeat=2):
                    if l2 < l3:
                        continue
                    if not any(s in s2 & s3 and t in s2 & s3 for s, t in nonadj):
                        continue
                    rep.instances += 1
                    bound = 2 * (l2 - l3) + 4 * N
                    d23 = dist(x2, x3)
                    if not d23 < bound:
                        rep.fail(f'b={_name(g, words[y])} x1={_name(g, words[x1])} x2={_name(g, words[x2])} '
                                 f'x3={_name(g, words[x3])}: d={d23} bound={bound}')


def _backprops(g, rep, radius, **_):
    b = _ball(g, radius)
    star = GroupElement()
    for i, w in enumerate(b.canonical):
        x = GroupElement(w)
        comb = back_combing(g, x, star)
        segs = comb.segments
        rep.instances += 1
        for k, seg in enumerate(segs):
            if any(not g.commute(s, t) or s == t for s, t in itertools.combinations(seg, 2)):
                rep.fail(f'{_name(g, w)}: segment {k + 1} letters do not commute')
            if k + 1 < len(segs) and any(all(g.commute(s, t) for t in seg) for s in segs[k + 1]):
                rep.fail(f'{_name(g, w)}: a letter of segment {k + 2} commutes with all of segment {k + 1}')
        if b.lookup(w + comb.word) != 0 or len(comb.word) != len(w):
            rep.fail(f'{_name(g, w)}: back combing is not a geodesic to the base point')
        roots = edge_roots(g, comb.word, x)
        seg_walls, pos = [], 0
        for seg in segs:
            seg_walls.append(set(roots[pos:pos + len(seg)]))
            pos += len(seg)
        # every v on a geodesic from x to the base point: prefixes of rearrangements
        vs = _below(b, i)
        hit_sets = {}
        for j in vs:
            sub = back_combing(g, x, GroupElement(b.canonical[j]))
            r2 = edge_roots(g, sub.word, x)
            pos = 0
            for k, seg in enumerate(sub.segments):
                walls_k = set(r2[pos:pos + len(seg)])
                pos += len(seg)
                if k >= len(seg_walls) or not walls_k <= seg_walls[k]:
                    rep.fail(f'{_name(g, w)} to {_name(g, b.canonical[j])}: segment {k + 1} walls not nested')
            gw = set(r2)
            hit_sets[j] = gw
            hits = [k for k in range(len(seg_walls)) if gw & seg_walls[k]]
            if hits and hits != list(range(hits[-1] + 1)):
                rep.fail(f'{_name(g, w)} to {_name(g, b.canonical[j])}: walls hit segments {hits}')
        rep.instances += len(vs)
        for j1, j2 in itertools.combinations(vs, 2):
            common = hit_sets[j1] & hit_sets[j2]
            hits = [k for k in range(len(seg_walls)) if common & seg_walls[k]]
            if hits and hits != list(range(hits[-1] + 1)):
                rep.fail(f'{_name(g, w)}: common walls toward {j1}, {j2} hit segments {hits}')


def _below(b: CayleyBall, i: int) -> list[int]:
    """Elements on some geodesic from element i down to the identity."""
    seen = {i}
    stack = [i]
    while stack:
        j = stack.pop()
        for p, _ in b.predecessors(j):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return sorted(seen)


def _twodir(g, rep, radius, **_):
    if find_visual_z2z2_power(g, 3) is not None:
        rep.notes.append('graph contains a visual (Z2*Z2)^3; hypothesis fails')
        return
    cfg = ThresholdConfig()
    b = _ball(g, radius)
    star = GroupElement()
    for i, w in enumerate(b.canonical):
        x = GroupElement(w)
        try:
            ds = _reduce(g, x, star, cfg)
        except PreconditionError:
            rep.skipped += 1
            continue
        except RuntimeError as exc:
            rep.instances += 1
            rep.fail(f'{_name(g, w)}: {exc}')
            continue
        rep.instances += 1
        if len(ds.dirs) > 2 or not ds.dirs:
            rep.fail(f'{_name(g, w)}: {len(ds.dirs)} directions survive')
        for u in ds.dirs:
            if b.lookup(w + u) is None or int(b.layer[b.lookup(w + u)]) != len(w) - len(u):
                rep.fail(f'{_name(g, w)}: direction {_name(g, u)} does not head to the base point')


def _avoidlink(g, rep, radius, cap=16, **_):
    if ends_class(g) != 'one_ended' or find_virtual_factor_separator(g) is not None:
        rep.notes.append('graph is not one-ended or has a virtual factor separator; hypothesis fails')
        return
    b = _ball(g, radius)
    for i, w in enumerate(b.canonical):
        B = 0
        for s in b.back_labels(i):
            B |= 1 << s
        gammas = set()
        for u in oracle_geodesics(b, i, cap):
            for k in range(len(u)):
                L = 0
                for s in u[k:]:
                    L |= 1 << s
                if not g.is_clique(L):
                    gammas.add(L)
        for L in sorted(gammas):
            link = g.link_mask(L) & ~L
            avoid = link | B
            for s in range(g.n):
                for t in range(s, g.n):
                    if B >> s & 1 or B >> t & 1:
                        continue
                    rep.instances += 1
                    try:
                        path = avoid_path(g, s, t, avoid)
                    except AvoidPathError as exc:
                        rep.fail(f'{_name(g, w)}: {exc}')
                        continue
                    vs = path.vertices
                    if vs[0] != s or vs[-1] != t or path.length < 2:
                        rep.fail(f'{_name(g, w)}: bad endpoints or length {vs}')
                    if any(avoid >> x & 1 for x in path.interior if x not in (s, t)):
                        rep.fail(f'{_name(g, w)}: interior meets the avoided set {vs}')
                    if any(not g.commute(x, y) or x == y for x, y in zip(vs, vs[1:])):
                        rep.fail(f'{_name(g, w)}: consecutive vertices not adjacent {vs}')


def _filterprops(g, rep, depth, **_):
    try:
        sl, sr = default_spines(g, (), depth)
    except FilterError as exc:
        rep.notes.append(f'no spines: {exc}')
        return
    for strategy in ('basic', 'directed'):
        try:
            f = build_filter(g, sl, sr, (), depth, strategy)
        except FilterError as exc:
            rep.instances += 1
            rep.fail(f'{strategy}: {exc}')
            continue
        except AvoidPathError as exc:
            rep.notes.append(f'{strategy}: {exc}')
            continue
        r = check_filter_properties(f)
        rep.instances += len(r.results)
        for k, v in r.results.items():
            if v is not None:
                rep.fail(f'{strategy} property {k}: {v}')
        rep.notes.append(f'{strategy}: {len(f.nodes)} nodes, {len(f.edges)} edges')


SUITES = {
    'sameletters': _sameletters,
    'deletion': _deletion,
    'finiteback': _finiteback,
    'radel': _radel,
    'differentletters': _differentletters,
    'wallprops': _wallprops,
    'shortback': _shortback,
    'diamond': _diamond,
    'doublediamond': _doublediamond,
    'backprops': _backprops,
    'twodir': _twodir,
    'avoidlink': _avoidlink,
    'filterprops': _filterprops,
}
assert tuple(SUITES) == LEMMAS


def run_suite(g: PresentationGraph, lemma: str, seed: int = 0, **params) -> Report:
    if lemma not in SUITES:
        raise UnknownLemmaError(f'unknown lemma {lemma!r}; choose from {", ".join(LEMMAS)}')
    merged = dict(DEFAULTS[lemma])
    merged.update({k: v for k, v in params.items() if v is not None})
    merged['seed'] = seed
    rep = Report(lemma, merged)
    t = time.perf_counter()
    try:
        SUITES[lemma](g, rep, **merged)
    except BallCapExceeded as exc:
        rep.aborted = str(exc)
    rep.seconds = time.perf_counter() - t
    return rep


def _run_one(args):
    g, lemma, seed, params = args
    return run_suite(g, lemma, seed, **params)


def run_all(g: PresentationGraph, seed: int = 0, jobs: int = 1, **params) -> list[Report]:
    """Every suite, in the fixed lemma order; results do not depend on jobs."""
    tasks = [(g, lemma, seed, {k: v for k, v in params.items() if k in DEFAULTS[lemma] or k in ('samples', 'cap')})
             for lemma in LEMMAS]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_run_one, tasks))
    return [_run_one(t) for t in tasks]


def reports_text(reports: list[Report], timing: bool = False) -> str:
    return ''.join(r.text(timing) for r in reports)


def reports_json(reports: list[Report], timing: bool = False) -> str:
    return json.dumps([r.to_json(timing) for r in reports], indent=2, sort_keys=True) + '\n'
