"""Local connectivity of the boundary, decided from the presentation graph."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .presentation import (
    PresentationGraph, SeparatorWitness, VfsWitness, ends_class,
    find_clique_separator, find_dihedral_factor, find_visual_z2z2_power,
    search_virtual_factor_separator,
)

__all__ = ['Verdict', 'classify', 'explain', 'verdict_json', 'STATUSES', 'CASES']

STATUSES = ('locally_connected', 'non_locally_connected', 'hypothesis_violated', 'not_one_ended')
CASES = ('item1', 'item2', 'none')


@dataclass(frozen=True)
class Verdict:
    status: str
    case: str
    vfs: VfsWitness | None = None
    dihedral: tuple[str, str] | None = None
    pairs: tuple[tuple[str, str], ...] | None = None
    separator: SeparatorWitness | None = None
    factor: tuple[str, ...] | None = None
    factor_ends: str | None = None
    ends: str | None = None
    search_complete: bool | None = None
    generators: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.status not in STATUSES or self.case not in CASES:
            raise ValueError(f'bad verdict {self.status}/{self.case}')
        if self.case == 'item1' and self.dihedral is None:
            raise ValueError('item1 verdict without a dihedral pair')
        if self.case == 'item2' and self.status == 'non_locally_connected' and self.vfs is None:
            raise ValueError('item2 non-locally-connected verdict without a separator witness')
        if self.status == 'hypothesis_violated' and (self.pairs is None or len(self.pairs) != 3):
            raise ValueError('hypothesis_violated verdict without three pairs')


def classify(g: PresentationGraph) -> Verdict:
    gens = g.generators
    ends = ends_class(g)
    if ends != 'one_ended':
        return Verdict('not_one_ended', 'none', separator=find_clique_separator(g), ends=ends, generators=gens)
    pairs = find_visual_z2z2_power(g, 3)
    if pairs is not None:
        return Verdict('hypothesis_violated', 'none', pairs=tuple(pairs), ends=ends, generators=gens)
    dihedral = find_dihedral_factor(g)
    if dihedral is not None:
        rest = tuple(x for x in gens if x not in dihedral)
        a = g.induced(rest)
        if find_visual_z2z2_power(a, 2) is not None:
            raise RuntimeError(f'factor {rest} complementing {dihedral} is not hyperbolic')
        a_ends = ends_class(a)
        status = 'non_locally_connected' if a_ends == 'infinite_ended' else 'locally_connected'
        return Verdict(status, 'item1', dihedral=dihedral, factor=rest, factor_ends=a_ends,
                       ends=ends, generators=gens)
    search = search_virtual_factor_separator(g)
    status = 'locally_connected' if search.witness is None else 'non_locally_connected'
    return Verdict(status, 'item2', vfs=search.witness, ends=ends,
                   search_complete=search.complete, generators=gens)


def _set(g: tuple[str, ...], xs) -> str:
    order = {x: i for i, x in enumerate(g)}
    return '{' + ', '.join(sorted(xs, key=lambda x: order.get(x, len(order)))) + '}'


def explain(v: Verdict) -> str:
    gens = v.generators
    if v.status == 'not_one_ended':
        lines = [f'not one-ended ({v.ends.replace("_", " ")})']
        if v.separator is not None:
            comps = ' | '.join(_set(gens, c) for c in v.separator.components)
            lines.append(f'clique separator {_set(gens, v.separator.cut)} splits into {comps}')
        else:
            lines.append('the presentation graph has at most one non-adjacent pair')
        return '\n'.join(lines) + '\n'
    if v.status == 'hypothesis_violated':
        pairs = ', '.join(f'({s}, {t})' for s, t in v.pairs)
        return ('hypothesis violated: visual (Z2*Z2)^3 subgroup\n'
                f'pairs {pairs}\n')
    if v.case == 'item1':
        s, t = v.dihedral
        word = 'locally connected' if v.status == 'locally_connected' else 'not locally connected'
        lines = [
            f'item 1: {word} (dihedral factor <{s}, {t}>)',
            f'W = <{s}, {t}> x A with A = <{", ".join(v.factor)}>',
            f'A is {v.factor_ends.replace("_", " ")}',
            "the boundary is the suspension of A's boundary",
        ]
        return '\n'.join(lines) + '\n'
    if v.status == 'locally_connected':
        lines = ['item 2: locally connected (no virtual factor separator)']
        if v.search_complete is False:
            lines.append('search was pruned: cliques containing s or t were skipped')
        return '\n'.join(lines) + '\n'
    w = v.vfs
    return ('item 2: not locally connected (virtual factor separator)\n'
            f'C = {_set(gens, w.c)}\n'
            f'D = {_set(gens, w.d)}\n'
            f's = {w.s}, t = {w.t}\n')


def _sorted(gens, xs) -> list[str]:
    order = {x: i for i, x in enumerate(gens)}
    return sorted(xs, key=lambda x: order.get(x, len(order)))


def verdict_json(v: Verdict) -> str:
    gens = v.generators
    wit: dict = {}
    if v.vfs is not None:
        wit['vfs'] = {'C': _sorted(gens, v.vfs.c), 'D': _sorted(gens, v.vfs.d), 's': v.vfs.s, 't': v.vfs.t}
    if v.dihedral is not None:
        wit['dihedral'] = list(v.dihedral)
        wit['factor'] = list(v.factor)
        wit['factor_ends'] = v.factor_ends
    if v.pairs is not None:
        wit['pairs'] = [list(p) for p in v.pairs]
    if v.separator is not None:
        wit['clique_separator'] = {'cut': _sorted(gens, v.separator.cut),
                                   'components': [_sorted(gens, c) for c in v.separator.components]}
    if v.search_complete is not None:
        wit['search_complete'] = v.search_complete
    doc = {'status': v.status, 'case': v.case, 'ends': v.ends, 'witnesses': wit}
    return json.dumps(doc, indent=2, sort_keys=True) + '\n'
