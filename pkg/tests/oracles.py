"""Brute-force reference implementations used by the tests.

Everything here works from the generator names and edge list with plain
Python sets, and deliberately avoids the package's bitmask helpers.
"""

from __future__ import annotations

import itertools
import math
from collections import deque


def edges_of(g) -> set[frozenset[str]]:
    return {frozenset(e) for e in g.edge_list()}


def adjacent(E, s, t) -> bool:
    return frozenset((s, t)) in E


def components(V, E, removed) -> list[set[str]]:
    rest = [v for v in V if v not in removed]
    seen, out = set(), []
    for v in rest:
        if v in seen:
            continue
        comp, queue = {v}, deque([v])
        while queue:
            x = queue.popleft()
            for y in rest:
                if y not in comp and adjacent(E, x, y):
                    comp.add(y)
                    queue.append(y)
        seen |= comp
        out.append(comp)
    return out


def is_clique(E, xs) -> bool:
    return all(adjacent(E, a, b) for a, b in itertools.combinations(xs, 2))


def separates(V, E, C) -> bool:
    return len(components(V, E, set(C))) >= 2


def all_vfs(g) -> list[tuple[frozenset, frozenset, str, str]]:
    """Every (C, D, s, t) meeting the definition, by labelling each vertex out / C-D / D."""
    V, E = list(g.generators), edges_of(g)
    found = []
    for labels in itertools.product((0, 1, 2), repeat=len(V)):
        C = {v for v, l in zip(V, labels) if l}
        D = {v for v, l in zip(V, labels) if l == 2}
        K = C - D
        if not is_clique(E, K):
            continue
        if any(not adjacent(E, k, d) for k in K for d in D):
            continue
        if not separates(V, E, C):
            continue
        for s, t in itertools.combinations(V, 2):
            if s in D or t in D or adjacent(E, s, t):
                continue
            if all(adjacent(E, s, d) and adjacent(E, t, d) for d in D):
                found.append((frozenset(C), frozenset(D), s, t))
    return found


def clique_separators(g) -> list[frozenset[str]]:
    V, E = list(g.generators), edges_of(g)
    out = []
    for k in range(len(V) + 1):
        for C in itertools.combinations(V, k):
            if is_clique(E, C) and separates(V, E, C):
                out.append(frozenset(C))
    return out


def ends(g) -> str:
    V, E = list(g.generators), edges_of(g)
    non = [p for p in itertools.combinations(V, 2) if not adjacent(E, *p)]
    if not non:
        return 'finite'
    if len(non) == 1:
        return 'two_ended'
    return 'infinite_ended' if clique_separators(g) else 'one_ended'


def dihedral_factors(g) -> list[tuple[str, str]]:
    V, E = list(g.generators), edges_of(g)
    return [(s, t) for s, t in itertools.combinations(V, 2) if not adjacent(E, s, t)
            and all(adjacent(E, s, x) and adjacent(E, t, x) for x in V if x not in (s, t))]


def z2z2_power(g, k: int) -> bool:
    V, E = list(g.generators), edges_of(g)
    pairs = [p for p in itertools.combinations(V, 2) if not adjacent(E, *p)]
    for combo in itertools.combinations(pairs, k):
        flat = [x for p in combo for x in p]
        if len(set(flat)) != 2 * k:
            continue
        if all(adjacent(E, a, b) for p, q in itertools.combinations(combo, 2) for a in p for b in q):
            return True
    return False


def mr_pairs(g) -> list[tuple[str, str]]:
    V, E = list(g.generators), edges_of(g)
    out = []
    for v, w in itertools.combinations(V, 2):
        if adjacent(E, v, w):
            continue
        L = {x for x in V if adjacent(E, x, v) and adjacent(E, x, w)}
        if set(V) - L - {v, w} and separates(V, E, L):
            out.append((v, w))
    return out


def tits_geodesic(g, w) -> bool:
    """Tits' solution: w is reduced iff no word reachable by commutations has a repeated adjacent letter."""
    w = tuple(w)
    seen = {w}
    queue = deque([w])
    while queue:
        u = queue.popleft()
        for i in range(len(u) - 1):
            a, b = u[i], u[i + 1]
            if a == b:
                return False
            if g.commute(a, b):
                v = u[:i] + (b, a) + u[i + 2:]
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    return True


def tits_reduce(g, w) -> tuple[int, ...]:
    """Some reduced word for w: cancel adjacent pairs after commutations until none remain."""
    w = tuple(w)
    while True:
        seen = {w}
        queue = deque([w])
        hit = None
        while queue and hit is None:
            u = queue.popleft()
            for i in range(len(u) - 1):
                a, b = u[i], u[i + 1]
                if a == b:
                    hit = u[:i] + u[i + 2:]
                    break
                if g.commute(a, b):
                    v = u[:i] + (b, a) + u[i + 2:]
                    if v not in seen:
                        seen.add(v)
                        queue.append(v)
        if hit is None:
            return w
        w = hit


def commutation_class(g, w) -> set[tuple[int, ...]]:
    w = tuple(w)
    seen = {w}
    queue = deque([w])
    while queue:
        u = queue.popleft()
        for i in range(len(u) - 1):
            a, b = u[i], u[i + 1]
            if a != b and g.commute(a, b):
                v = u[:i] + (b, a) + u[i + 2:]
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    return seen


def growth_series(g, radius: int) -> tuple[int, ...]:
    """Sphere sizes from Steinberg's formula 1/W(t) = sum over cliques of (-t/(1+t))^|clique|."""
    V, E = list(g.generators), edges_of(g)
    cliques = [c for k in range(len(V) + 1) for c in itertools.combinations(V, k) if is_clique(E, c)]
    d = max(len(c) for c in cliques)
    m = radius + 1

    def binom_series(e):
        # (1+t)^e truncated
        out = [0] * m
        for k in range(min(e, m - 1) + 1):
            out[k] = math.comb(e, k)
        return out

    den = [0] * m
    for c in cliques:
        k = len(c)
        if k < m:
            for i, b in enumerate(binom_series(d - k)):
                if i + k < m:
                    den[i + k] += (-1) ** k * b
    num = binom_series(d)
    out = [0] * m
    for i in range(m):
        out[i] = num[i] - sum(den[j] * out[i - j] for j in range(1, i + 1))
    return tuple(out)
