import random

import oracles as O
import pytest
from conftest import presentation_graphs
from hypothesis import given

from racg.fixtures import FIXTURES, HEXAGON_AMALGAM_CONSTRAINTS, fixture, random_graph
from racg.presentation import (
    EmptyGeneratorsError, MalformedTokenError, ParseError, PresentationGraph, SelfLoopError,
    UnknownGeneratorError, UnknownVertexError, VfsWitness, ends_class, find_clique_separator,
    find_dihedral_factor, find_mr_nonlocal_witness, find_virtual_factor_separator,
    find_visual_z2z2_power, format_dot, format_native, is_separating, is_vfs, link,
    parse_presentation, search_virtual_factor_separator,
)


def G(text):
    return parse_presentation(text)


PATH3 = 'vertices a b c\nedges a-b b-c'
K3 = 'vertices a b c\nedges a-b b-c a-c'


# parsing

def test_parse_single_edge():
    g = G('vertices a b\nedges a-b')
    assert g.generators == ('a', 'b')
    assert g.commute(0, 1)


def test_parse_pentagon(graphs):
    g = G('vertices a b c d e\nedges a-b b-c c-d d-e e-a')
    assert g == graphs['p5']
    assert len(g.edge_list()) == 5


def test_parse_comments_and_multiple_edge_lines():
    g = G("# a comment\nvertices x y' z_1\n\nedges x-y'\n# more\nedges y'-z_1\n")
    assert g.generators == ('x', "y'", 'z_1')
    assert g.edge_list() == [('x', "y'"), ("y'", 'z_1')]


def test_duplicate_edges_collapse():
    assert len(G('vertices a b\nedges a-b b-a a-b').edge_list()) == 1


@pytest.mark.parametrize('text, exc, line', [
    ('vertices a\nedges a-a', SelfLoopError, 2),
    ('vertices a b\nedges a-c', UnknownVertexError, 2),
    ('vertices a b\nedges a--b', MalformedTokenError, 2),
    ('vertices a b\nedges ab', MalformedTokenError, 2),
    ('vertices a b\nvertices c', MalformedTokenError, 2),
    ('edges a-b\nvertices a b', MalformedTokenError, 1),
    ('vertices a a', MalformedTokenError, 1),
    ('vertices a b!', MalformedTokenError, 1),
    ('vertices', EmptyGeneratorsError, 1),
    ('# nothing\n', EmptyGeneratorsError, 1),
    ('', EmptyGeneratorsError, 1),
    ('nodes a b', MalformedTokenError, 1),
])
def test_parse_errors_carry_line(text, exc, line):
    with pytest.raises(exc) as info:
        G(text)
    assert info.value.line == line
    assert isinstance(info.value, ParseError)


def test_dot_import():
    g = G('graph P { a; b; c; a -- b -- c [color=red]; "c" -- a; }')
    assert g.generators == ('a', 'b', 'c')
    assert {frozenset(e) for e in g.edge_list()} == {frozenset('ab'), frozenset('bc'), frozenset('ac')}


@pytest.mark.parametrize('text', [
    'digraph { a -> b }',
    'graph { a -> b }',
    'graph { a -- a }',
    'graph { a -- b',
])
def test_dot_rejects(text):
    with pytest.raises(ParseError):
        G(text)


@pytest.mark.parametrize('name', list(FIXTURES))
def test_round_trip_formats(name):
    g = fixture(name)
    assert G(format_native(g)) == g
    h = G(format_dot(g))
    assert h.generators == g.generators and h == g


def test_dot_export_has_labels_and_unlabelled_edges(graphs):
    text = format_dot(graphs['square'])
    assert 'a [label="a"];' in text
    assert 'a -- b;' in text


def test_graph_rejects_bad_construction():
    with pytest.raises(ValueError):
        PresentationGraph(('a', 'a'), frozenset())
    with pytest.raises(ValueError):
        PresentationGraph(('a',), frozenset({frozenset(('a', 'z'))}))


def test_unknown_generator_in_mask(graphs):
    with pytest.raises(UnknownGeneratorError):
        graphs['p5'].mask(['z'])


# link and separation

@pytest.mark.parametrize('a, expect', [('a', 'be'), ('', 'abcde'), ('ab', '')])
def test_link_p5(graphs, a, expect):
    assert link(graphs['p5'], a) == frozenset(expect)


def test_is_separating_examples(graphs):
    w = is_separating(graphs['square'], 'bd')
    assert set(w.components) == {frozenset('a'), frozenset('c')}
    assert is_separating(graphs['p5'], 'a') is None
    w = is_separating(graphs['p5'], 'ac')
    assert w.components == (frozenset('b'), frozenset('de'))
    assert is_separating(graphs['p5'], 'abcde') is None


def test_clique_separator_examples(graphs):
    assert find_clique_separator(G(PATH3)).cut == frozenset('b')
    assert find_clique_separator(graphs['p5']) is None
    assert find_clique_separator(graphs['hexagon']) is None


def test_ends_examples(graphs):
    assert ends_class(G(K3)) == 'finite'
    assert ends_class(G('vertices a b')) == 'two_ended'
    assert ends_class(graphs['p5']) == 'one_ended'
    assert ends_class(graphs['path4']) == 'infinite_ended'


def test_z2z2_examples(graphs):
    assert find_visual_z2z2_power(graphs['octahedron'], 3) == [('a', 'b'), ('c', 'd'), ('e', 'f')]
    assert find_visual_z2z2_power(graphs['p5'], 2) is None
    assert find_visual_z2z2_power(graphs['square'], 2) == [('a', 'c'), ('b', 'd')]
    with pytest.raises(ValueError):
        find_visual_z2z2_power(graphs['p5'], 0)


def test_dihedral_examples(graphs):
    assert find_dihedral_factor(graphs['square']) == ('a', 'c')
    assert find_dihedral_factor(graphs['p5']) is None
    assert find_dihedral_factor(graphs['five']) == ('u', 'v')


def test_vfs_examples(graphs):
    assert find_virtual_factor_separator(graphs['square']) == VfsWitness(frozenset('bd'), frozenset('bd'), 'a', 'c')
    assert find_virtual_factor_separator(graphs['p5']) is None
    assert find_virtual_factor_separator(graphs['hexagon']) is None
    assert find_virtual_factor_separator(graphs['six']) == VfsWitness(frozenset('uv'), frozenset('uv'), 's', 't')


def test_mr_examples(graphs):
    assert find_mr_nonlocal_witness(graphs['six']) == ('s', 't')
    assert find_mr_nonlocal_witness(graphs['p5']) is None
    # the common link {b,d} separates, but nothing is left besides a and c
    assert find_mr_nonlocal_witness(graphs['square']) is None


def test_six_common_link(graphs):
    assert link(graphs['six'], 'st') == frozenset('uvq')


def test_hexagon_amalgam_constraints(graphs):
    g = graphs['hexagon_amalgam']
    A = [f'a{i}' for i in range(1, 7)]
    assert len(HEXAGON_AMALGAM_CONSTRAINTS) == 5
    cyc = g.induced(A)
    assert all(len(link(cyc, [a]) - {a}) == 2 for a in A) and ends_class(cyc) == 'one_ended'
    for x in ('x', 'x2'):
        assert set(A) <= link(g, [x])
    side1, side2 = {'x', 'y', 'z'}, {'x2', 'y2', 'z2'}
    assert not any(frozenset((p, q)) in O.edges_of(g) for p in side1 for q in side2)
    for side in (side1, side2):
        h = g.induced(sorted(side | set(A), key=g.index.__getitem__))
        assert find_visual_z2z2_power(h, 2) is None
        assert find_clique_separator(h) is None
    assert is_vfs(g, VfsWitness(frozenset(A), frozenset(A), 'x', 'x2'))


# agreement with brute force

@pytest.mark.parametrize('name', [n for n in FIXTURES if n != 'hexagon_amalgam'])
def test_fixture_predicates_match_brute_force(name):
    g = fixture(name)
    assert ends_class(g) == O.ends(g)
    assert (find_dihedral_factor(g) is None) == (not O.dihedral_factors(g))
    assert (find_visual_z2z2_power(g, 3) is None) == (not O.z2z2_power(g, 3))
    found = find_virtual_factor_separator(g)
    every = O.all_vfs(g)
    assert (found is None) == (not every)
    if found is not None:
        assert (found.c, found.d, found.s, found.t) in every


@given(presentation_graphs(max_n=6))
def test_vfs_search_matches_enumeration(g):
    every = O.all_vfs(g)
    found = find_virtual_factor_separator(g)
    assert (found is None) == (not every)
    if found:
        assert is_vfs(g, found)
        assert (found.c, found.d, found.s, found.t) in every


@given(presentation_graphs(max_n=7))
def test_predicates_match_brute_force(g):
    assert ends_class(g) == O.ends(g)
    seps = O.clique_separators(g)
    w = find_clique_separator(g)
    assert (w is None) == (not seps)
    if w is not None:
        assert w.cut in seps
    d = find_dihedral_factor(g)
    assert d == (O.dihedral_factors(g) or [None])[0]
    assert (find_mr_nonlocal_witness(g) or None) == (O.mr_pairs(g) or [None])[0]
    for k in (1, 2, 3):
        assert (find_visual_z2z2_power(g, k) is not None) == O.z2z2_power(g, k)


@given(presentation_graphs(max_n=8))
def test_mr_implies_vfs(g):
    if find_mr_nonlocal_witness(g) is not None:
        assert find_virtual_factor_separator(g) is not None


@given(presentation_graphs(max_n=7))
def test_whole_set_never_separates(g):
    assert is_separating(g, g.generators) is None


def test_is_separating_matches_reachability():
    rng = random.Random(7)
    for k in range(1000):
        g = random_graph(k, rng.randint(1, 8), rng.random())
        c = [v for v in g.generators if rng.random() < 0.4]
        got = is_separating(g, c)
        assert (got is not None) == O.separates(g.generators, O.edges_of(g), set(c))
        if got is not None:
            assert sorted(map(sorted, got.components)) == sorted(
                map(sorted, O.components(g.generators, O.edges_of(g), set(c))))


@given(presentation_graphs(max_n=7))
def test_z2z2_one_iff_not_complete(g):
    complete = all(g.commute(s, t) for s in range(g.n) for t in range(g.n))
    assert (find_visual_z2z2_power(g, 1) is not None) == (not complete)


@given(presentation_graphs(max_n=7))
def test_ends_laws(g):
    complete = all(g.commute(s, t) for s in range(g.n) for t in range(g.n))
    assert (ends_class(g) == 'finite') == complete
    if ends_class(g) == 'one_ended':
        assert find_clique_separator(g) is None


@given(presentation_graphs(max_n=6))
def test_witnesses_follow_declaration_order(g):
    # relabelling by a permutation that keeps the declaration order keeps the witness
    names = [f'w{i}' for i in range(g.n)]
    ren = dict(zip(g.generators, names))
    h = PresentationGraph.from_edges(names, [(ren[a], ren[b]) for a, b in g.edge_list()])
    w1, w2 = find_virtual_factor_separator(g), find_virtual_factor_separator(h)
    if w1 is None:
        assert w2 is None
    else:
        assert w2 == VfsWitness(frozenset(ren[x] for x in w1.c), frozenset(ren[x] for x in w1.d),
                                ren[w1.s], ren[w1.t])


def test_pruned_search_flag():
    g = fixture('six')
    full = search_virtual_factor_separator(g)
    pruned = search_virtual_factor_separator(g, complete=False)
    assert full.complete and not pruned.complete
    assert pruned.witness == full.witness
