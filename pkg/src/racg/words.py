"""Geodesic word calculus in a right-angled Coxeter group.

Words are tuples of generator indices.  Elements are stored by their
ShortLex normal form: the lexicographically least geodesic word, where
letters are ordered by declaration order in the presentation graph.

Everything rests on one incremental fact.  If w is geodesic then w·s is
geodesic unless the last occurrence of s in w is followed only by letters
commuting with s, in which case that occurrence cancels against s.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .presentation import PresentationGraph, bits, UnknownGeneratorError

__all__ = [
    'Word', 'GroupElement', 'InvalidGeneratorError',
    'parse_word', 'format_word', 'is_geodesic', 'deletable_pair',
    'normal_form', 'append', 'multiply', 'inverse', 'distance',
    'lett', 'back_set', 'geodesic_words', 'is_clique_word',
]

Word = tuple


class InvalidGeneratorError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class GroupElement:
    word: tuple[int, ...] = ()

    def __len__(self):
        return len(self.word)

    @classmethod
    def identity(cls) -> 'GroupElement':
        return cls(())


def _letters(g: PresentationGraph, w: Iterable[int]) -> tuple[int, ...]:
    if isinstance(w, GroupElement):
        w = w.word
    w = tuple(w)
    n = g.n
    for s in w:
        if type(s) is not int or not 0 <= s < n:
            raise InvalidGeneratorError(f'invalid generator index {s!r}')
    return w


def parse_word(g: PresentationGraph, text: str | Sequence[str]) -> tuple[int, ...]:
    """Whitespace-separated generator names to a word."""
    names = text.split() if isinstance(text, str) else list(text)
    try:
        return tuple(g.index[x] for x in names)
    except KeyError as exc:
        raise UnknownGeneratorError(f'unknown generator {exc.args[0]!r}') from None


def format_word(g: PresentationGraph, w: Iterable[int]) -> str:
    if isinstance(w, GroupElement):
        w = w.word
    return ' '.join(g.generators[s] for s in w)


def is_geodesic(g: PresentationGraph, w: Sequence[int]) -> bool:
    adj = g.adj
    n = g.n
    back = 0
    for s in w:
        if type(s) is not int or not 0 <= s < n:
            raise InvalidGeneratorError(f'invalid generator index {s!r}')
        bit = 1 << s
        if back & bit:
            return False
        back = (back & adj[s]) | bit
    return True


def deletable_pair(g: PresentationGraph, w: Sequence[int]) -> tuple[int, int] | None:
    """First (i, j), i < j, such that deleting letters i and j leaves the same element."""
    w = _letters(g, w)
    adj = g.adj
    alive: dict[int, int] = {}
    for k, s in enumerate(w):
        if s in alive:
            return alive[s], k
        for t in [t for t in alive if not adj[s] >> t & 1]:
            del alive[t]
        alive[s] = k
    return None


def _append(adj: tuple[int, ...], w: tuple[int, ...], s: int) -> tuple[int, ...]:
    j = len(w) - 1
    row = adj[s]
    while j >= 0:
        x = w[j]
        if x == s:
            return w[:j] + w[j + 1:]
        if not row >> x & 1:
            break
        j -= 1
    p = j + 1
    while p < len(w) and w[p] < s:
        p += 1
    return w[:p] + (s,) + w[p:]


def append(g: PresentationGraph, e: GroupElement, s: int) -> GroupElement:
    """Normal form of e·s by a single backward scan."""
    if type(s) is not int or not 0 <= s < g.n:
        raise InvalidGeneratorError(f'invalid generator index {s!r}')
    return GroupElement(_append(g.adj, e.word, s))


def normal_form(g: PresentationGraph, w: Iterable[int]) -> GroupElement:
    w = _letters(g, w)
    adj = g.adj
    out: tuple[int, ...] = ()
    for s in w:
        out = _append(adj, out, s)
    return GroupElement(out)


def multiply(g: PresentationGraph, e: GroupElement, w: Iterable[int]) -> GroupElement:
    out = e.word
    adj = g.adj
    for s in _letters(g, w):
        out = _append(adj, out, s)
    return GroupElement(out)


def inverse(g: PresentationGraph, e: GroupElement) -> GroupElement:
    return normal_form(g, reversed(e.word))


def distance(g: PresentationGraph, x: GroupElement, y: GroupElement) -> int:
    return len(multiply(g, inverse(g, x), y.word))


def lett(w: Iterable[int]) -> frozenset[int]:
    if isinstance(w, GroupElement):
        w = w.word
    return frozenset(w)


def back_set(g: PresentationGraph, e: GroupElement) -> frozenset[int]:
    """Generators s with |e·s| < |e|; these pairwise commute."""
    full = g.full
    adj = g.adj
    blocked = 0
    out = 0
    for x in reversed(e.word):
        if not blocked >> x & 1:
            out |= 1 << x
        blocked |= full & ~adj[x]
    return frozenset(bits(out))


def is_clique_word(g: PresentationGraph, w: Sequence[int]) -> bool:
    return all(g.commute(a, b) and (a != b) for i, a in enumerate(w) for b in w[i + 1:])


def geodesic_words(g: PresentationGraph, e: GroupElement, cap: int = 10_000) -> list[tuple[int, ...]]:
    """Geodesic representatives of e in lexicographic order, at most cap of them.

    Each representative is a linear extension of the dependency order on the
    letters of the normal form, so we walk the minimal letters in increasing
    order.
    """
    if cap < 1:
        raise ValueError('cap must be at least 1')
    adj = g.adj
    out: list[tuple[int, ...]] = []
    prefix: list[int] = []

    def minimal(rest: tuple[int, ...]) -> list[int]:
        found = []
        blocked = 0
        seen = 0
        for i, x in enumerate(rest):
            bit = 1 << x
            if not (blocked | seen) & bit:
                found.append(i)
            seen |= bit
            blocked |= ~adj[x]
        return sorted(found, key=rest.__getitem__)

    def walk(rest: tuple[int, ...]) -> bool:
        if not rest:
            out.append(tuple(prefix))
            return len(out) < cap
        for i in minimal(rest):
            prefix.append(rest[i])
            go = walk(rest[:i] + rest[i + 1:])
            prefix.pop()
            if not go:
                return False
        return True

    walk(e.word)
    return out
