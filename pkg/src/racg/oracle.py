"""Brute-force ground truth on finite Cayley balls.

Elements are identified by where they send a fixed interior point of the
fundamental chamber under the contragredient of the Tits representation.
For g = a_1...a_k the key is sigma*_{a_k} ... sigma*_{a_1} rho with rho =
(1, ..., 1) and

    (sigma*_s f)_t = f_t + 2 f_s    if m(s, t) = inf
                   = -f_s           if t = s
                   = f_t            if s and t commute.

The orbit of an interior point is free, so equal keys mean equal
elements.  The ball is grown by plain breadth-first search over keys.
Nothing here consults the word calculus, so it can falsify it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .presentation import PresentationGraph

__all__ = [
    'CayleyBall', 'BallCapExceeded', 'OutsideBallError',
    'ball', 'oracle_distance', 'oracle_index', 'oracle_wall',
    'oracle_geodesics', 'oracle_back_set', 'element_cap', 'verify_lemma',
    'LEMMAS',
]

DEFAULT_CAP = 5_000_000
_LIMIT = 1 << 60


class BallCapExceeded(RuntimeError):
    pass


class OutsideBallError(ValueError):
    pass


def element_cap() -> int:
    env = os.environ.get('RACG_ELEMENT_CAP')
    return int(env) if env else DEFAULT_CAP


def _dual_matrix(g: PresentationGraph) -> np.ndarray:
    """coef[s, t]: multiplier of f_s added to f_t under sigma*_s."""
    n = g.n
    coef = np.zeros((n, n), dtype=np.int64)
    for s in range(n):
        for t in range(n):
            if s == t:
                coef[s, t] = -2
            elif not g.adj[s] >> t & 1:
                coef[s, t] = 2
    return coef


def _act(coef: np.ndarray, f: np.ndarray, s: int) -> np.ndarray:
    """sigma*_s applied to each row of f."""
    return f + np.outer(f[:, s], coef[s])


@dataclass(eq=False)
class CayleyBall:
    graph: PresentationGraph
    radius: int
    keys: np.ndarray
    layer: np.ndarray
    nbr: np.ndarray
    parent: np.ndarray
    parent_label: np.ndarray
    layer_sizes: tuple[int, ...]
    _coef: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.layer)

    def word(self, i: int) -> tuple[int, ...]:
        """ShortLex-least geodesic word of element i (first discovery in BFS)."""
        out = []
        while i:
            out.append(int(self.parent_label[i]))
            i = int(self.parent[i])
        return tuple(reversed(out))

    def words(self) -> Iterator[tuple[int, tuple[int, ...]]]:
        """(index, canonical word) for every element, in index order."""
        cache: list[tuple[int, ...]] = [()]
        for i in range(1, len(self)):
            w = cache[self.parent[i]] + (int(self.parent_label[i]),)
            cache.append(w)
        return iter(enumerate(cache))

    @cached_property
    def canonical(self) -> list[tuple[int, ...]]:
        return [w for _, w in self.words()]

    @cached_property
    def elements(self) -> dict[tuple[int, ...], int]:
        return {w: i for i, w in enumerate(self.canonical)}

    @cached_property
    def _key_index(self) -> dict[bytes, int]:
        k = np.ascontiguousarray(self.keys)
        return {k[i].tobytes(): i for i in range(len(k))}

    def key_of(self, w: Iterable[int]) -> np.ndarray:
        f = np.ones((1, self.graph.n), dtype=object)
        coef = self._coef.astype(object)
        for s in w:
            f = f + np.outer(f[:, s], coef[s])
        return f[0]

    def lookup(self, w: Sequence[int]) -> int | None:
        """Index of the element spelled by w, or None when outside the ball."""
        i = 0
        nbr = self.nbr
        n = self.graph.n
        for s in w:
            if not 0 <= s < n:
                raise ValueError(f'invalid generator index {s!r}')
            j = nbr[i, s]
            if j < 0:
                break
            i = j
        else:
            return int(i)
        key = self.key_of(w)
        if max(abs(int(x)) for x in key) >= _LIMIT:
            return None
        return self._key_index.get(np.array(key, dtype=np.int64).tobytes())

    def predecessors(self, i: int) -> list[tuple[int, int]]:
        """(j, s) with j·s = i and j one layer closer to the identity."""
        li = self.layer[i]
        return [(int(j), s) for s, j in enumerate(self.nbr[i]) if j >= 0 and self.layer[j] == li - 1]

    def back_labels(self, i: int) -> frozenset[int]:
        return frozenset(s for _, s in self.predecessors(i))

    @cached_property
    def matrices(self) -> np.ndarray:
        """M[i] with key(x·u) = M[i] @ key(x) for u the i-th element."""
        n = self.graph.n
        out = np.empty((len(self), n, n), dtype=np.int64)
        out[0] = np.eye(n, dtype=np.int64)
        coef = self._coef
        start = 1
        for size in self.layer_sizes[1:]:
            idx = np.arange(start, start + size)
            p, s = self.parent[idx], self.parent_label[idx]
            m = out[p]
            out[idx] = m + coef[s][:, :, None] * m[np.arange(size), s][:, None, :]
            start += size
        return out

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """(lower, label, upper) for every edge inside the ball."""
        for i in range(len(self)):
            for s, j in enumerate(self.nbr[i]):
                if j >= 0 and self.layer[j] == self.layer[i] + 1:
                    yield i, s, int(j)


def _row_hash(rows: np.ndarray, weights: np.ndarray) -> np.ndarray:
    with np.errstate(over='ignore'):
        return (rows.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def ball(g: PresentationGraph, radius: int, cap: int | None = None) -> CayleyBall:
    """All elements of length at most radius, layer by layer."""
    if radius < 0:
        raise ValueError('radius must be non-negative')
    cap = element_cap() if cap is None else cap
    n = g.n
    coef = _dual_matrix(g)
    weights = np.random.default_rng(0x5EED).integers(1, 2**63, size=n, dtype=np.uint64) | np.uint64(1)
    layers = [np.ones((1, n), dtype=np.int64)]
    parents = [np.zeros(1, dtype=np.int64)]
    plabels = [np.zeros(1, dtype=np.int64)]
    edges_fwd = []
    offset = [0, 1]
    total = 1
    # an element has at most omega descents and so at least n - omega ascents
    omega = max(bin(c).count('1') for c in g.cliques())
    for L in range(radius):
        cur = layers[-1]
        m = len(cur)
        if np.abs(cur).max() * (2 * n + 1) >= _LIMIT:
            raise BallCapExceeded('key entries exceed 64-bit range')
        if L and total + m * (n - omega) // max(omega, 1) > cap:
            raise BallCapExceeded(f'ball of radius {radius} exceeds {cap} elements')
        cand = np.empty((m, n, n), dtype=np.int64)
        for s in range(n):
            cand[:, s, :] = _act(coef, cur, s)
        cand = cand.reshape(m * n, n)
        prev = layers[-2] if L > 0 else np.empty((0, n), dtype=np.int64)
        pool = np.concatenate([prev, cur, cand])
        h = _row_hash(pool, weights)
        uniq, first, inv = np.unique(h, return_index=True, return_inverse=True)
        if not np.array_equal(pool, pool[first[inv]]):
            raise RuntimeError('hash collision among ball keys')
        base = len(prev) + m
        cinv = inv[base:]
        cfirst = first[cinv]
        if np.any((cfirst >= len(prev)) & (cfirst < base)):
            raise RuntimeError('odd cycle in Cayley graph: representation is not faithful')
        new_mask = cfirst >= base
        new_first = np.unique(cfirst[new_mask])
        count = len(new_first)
        if count == 0:
            break
        if total + count > cap:
            raise BallCapExceeded(f'ball of radius {radius} exceeds {cap} elements')
        rank = np.full(len(pool), -1, dtype=np.int64)
        rank[new_first] = np.arange(count)
        child_global = np.where(new_mask, offset[-1] + rank[cfirst], -1)
        # candidates already in the previous layer are back edges, filled from their parents
        src = np.repeat(np.arange(m, dtype=np.int64) + offset[-2], n)
        lab = np.tile(np.arange(n, dtype=np.int64), m)
        keep = new_mask
        edges_fwd.append((src[keep], lab[keep], child_global[keep]))
        layers.append(pool[new_first])
        parents.append(src[new_first - base])
        plabels.append(lab[new_first - base])
        total += count
        offset.append(total)
    keys = np.concatenate(layers)
    layer = np.concatenate([np.full(len(k), i, dtype=np.int64) for i, k in enumerate(layers)])
    nbr = np.full((total, n), -1, dtype=np.int64)
    for src, lab, dst in edges_fwd:
        nbr[src, lab] = dst
        nbr[dst, lab] = src
    return CayleyBall(
        graph=g, radius=radius, keys=keys, layer=layer, nbr=nbr,
        parent=np.concatenate(parents), parent_label=np.concatenate(plabels),
        layer_sizes=tuple(len(k) for k in layers), _coef=coef,
    )


def oracle_index(b: CayleyBall, w: Sequence[int]) -> int:
    i = b.lookup(tuple(w))
    if i is None:
        raise OutsideBallError('element lies outside the ball')
    return i


def oracle_distance(b: CayleyBall, w: Sequence[int]) -> int:
    return int(b.layer[oracle_index(b, w)])


def oracle_back_set(b: CayleyBall, w: Sequence[int]) -> frozenset[int]:
    return b.back_labels(oracle_index(b, w))


def oracle_geodesics(b: CayleyBall, i: int, cap: int = 10_000) -> list[tuple[int, ...]]:
    """Geodesic words from the identity to element i: paths down the BFS layers."""
    found: list[tuple[int, ...]] = []
    suffix: list[int] = []

    def walk(j: int) -> bool:
        if j == 0:
            found.append(tuple(reversed(suffix)))
            return len(found) < cap
        for p, s in b.predecessors(j):
            suffix.append(s)
            go = walk(p)
            suffix.pop()
            if not go:
                return False
        return True

    walk(i)
    return sorted(found)


def oracle_wall(b: CayleyBall, e) -> list[tuple[int, int]]:
    """Edges (lower, label) of the ball flipped by the reflection through edge e.

    e is an EdgeRef; the reflection r = v·s·v^-1 is applied by its action on
    keys and compared against the other endpoint of every ball edge.
    """
    v = tuple(e.base.word)
    r = v + (e.label,) + tuple(reversed(v))
    kr = b.key_of(r)
    if max(abs(int(x)) for x in kr) >= _LIMIT:
        raise OutsideBallError('reflection key out of range')
    kr = np.array(kr, dtype=np.int64)
    if b.lookup(v) is None or b.lookup(v + (e.label,)) is None:
        raise OutsideBallError('edge lies outside the ball')
    moved = b.matrices @ kr
    out = []
    nbr = b.nbr
    for s in range(b.graph.n):
        j = nbr[:, s]
        ok = j >= 0
        idx = np.nonzero(ok)[0]
        hit = np.all(moved[idx] == b.keys[j[idx]], axis=1)
        for i in idx[hit]:
            jj = int(j[i])
            if b.layer[i] < b.layer[jj]:
                out.append((int(i), s))
    return sorted(out)


LEMMAS = (
    'sameletters', 'deletion', 'finiteback', 'radel', 'differentletters',
    'wallprops', 'shortback', 'diamond', 'doublediamond', 'backprops',
    'twodir', 'avoidlink', 'filterprops',
)


def verify_lemma(g: PresentationGraph, lemma: str, **params):
    from .verify import run_suite
    return run_suite(g, lemma, **params)
