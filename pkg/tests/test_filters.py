import dataclasses
import json

import pytest
from conftest import presentation_graphs
from hypothesis import assume, given
from hypothesis import strategies as st

from racg.filters import (
    EDGE_KINDS, PROPERTIES, AvoidPathError, FilterError, avoid_path, build_fan, build_filter,
    check_filter_properties, default_spines, export_filter, extend_spine, filter_from_json,
    filter_walls,
)
from racg.walls import EdgeRef, wall_of
from racg.words import GroupElement, InvalidGeneratorError, is_geodesic, parse_word


def W(g, text):
    return parse_word(g, text)


def spines(g, left, right, depth, shared=()):
    return (extend_spine(g, shared, W(g, left), depth, min),
            extend_spine(g, shared, W(g, right), depth, max))


def filt(g, left, right, depth, strategy='basic'):
    sl, sr = spines(g, left, right, depth)
    return build_filter(g, sl, sr, (), depth, strategy)


def flip(f, eid):
    edges = list(f.edges)
    edges[eid] = dataclasses.replace(edges[eid], tree=not edges[eid].tree)
    return dataclasses.replace(f, edges=tuple(edges))


# avoid paths

def test_avoid_path_examples(graphs):
    p5, sq = graphs['p5'], graphs['square']
    assert avoid_path(p5, 0, 2).vertices == (0, 1, 2)
    assert avoid_path(p5, 0, 0).vertices == (0, 1, 0)
    # every detour from a to b is blocked: back and forth along the edge
    assert avoid_path(sq, 0, 1, avoid=[2, 3]).vertices == (0, 1, 0, 1)
    assert avoid_path(p5, 0, 2, avoid=1 << 1).vertices == (0, 4, 3, 2)


def test_avoid_path_endpoints_exempt(graphs):
    p5 = graphs['p5']
    # at [a c] the avoided set is lk{a,c} + B = {b, c}; b is an endpoint
    assert avoid_path(p5, 0, 1, avoid=[1, 2]).vertices == (0, 1, 0, 1)


def test_avoid_path_failures(graphs):
    p5 = graphs['p5']
    with pytest.raises(AvoidPathError):
        avoid_path(p5, 0, 2, avoid=[1, 3])
    with pytest.raises(AvoidPathError):
        avoid_path(p5, 0, 0, avoid=[1, 4])
    with pytest.raises(InvalidGeneratorError):
        avoid_path(p5, 0, 7)


@given(presentation_graphs(min_n=2, max_n=7), st.data())
def test_avoid_path_invariants(g, data):
    s = data.draw(st.integers(0, g.n - 1))
    t = data.draw(st.integers(0, g.n - 1))
    avoid = data.draw(st.sets(st.integers(0, g.n - 1)))
    try:
        p = avoid_path(g, s, t, avoid)
    except AvoidPathError:
        return
    v = p.vertices
    assert v[0] == s and v[-1] == t and p.length >= 2
    # s and t are exempt: the backtrack s, t, s, t passes through them
    assert not set(p.interior) & (avoid - {s, t})
    assert all(g.adj[a] >> b & 1 for a, b in zip(v, v[1:]))


# fans

def test_build_fan_examples(graphs):
    p5, sq = graphs['p5'], graphs['square']
    fan = build_fan(p5, (), 0, 2)
    assert fan.interior_labels == (1,)
    assert fan.loops == ((0, 1), (1, 2))
    fan = build_fan(sq, (), 0, 1)
    assert fan.labels == (0, 1, 0, 1)


def test_build_fan_errors(graphs):
    p5 = graphs['p5']
    with pytest.raises(FilterError):
        build_fan(p5, (0, 0), 1, 2)
    with pytest.raises(FilterError):
        build_fan(p5, (0,), 0, 2)


# filters

def test_depth_one_is_the_first_fan(graphs):
    p5 = graphs['p5']
    f = filt(p5, 'a', 'c', 1)
    assert len(f.fans) == 1 and f.loops == ()
    fr = f.fans[0]
    assert fr.node == f.root and len(fr.interior) == 1
    dot = export_filter(f, 'dot')
    leaves = [ln for ln in dot.splitlines() if ' -- ' in ln]
    assert len(leaves) == len(fr.interior) + 2
    assert 'n0_0 -- n1_0 [label="a"];' in dot


def test_duplicate_label_edges_are_not_identified(graphs):
    p5 = graphs['p5']
    sl, sr = default_spines(p5, (), 1)
    assert (sl, sr) == ((0,), (4,))
    f = build_filter(p5, sl, sr, (), 1)
    fr = f.fans[0]
    assert [f.edges[e].label for e in fr.interior] == [4, 0]
    # each interior edge repeats the label and endpoint element of the opposite spine edge
    for inner, spine in ((fr.interior[0], fr.right), (fr.interior[-1], fr.left)):
        a, b = f.edges[inner], f.edges[spine]
        assert a.label == b.label
        assert f.nodes[a.dst].element == f.nodes[b.dst].element
        assert a.dst != b.dst


@pytest.mark.parametrize('name, left, right', [('p5', 'a', 'c'), ('square', 'a', 'b'),
                                               ('six', 's', 't'), ('hexagon', 'a', 'c'),
                                               ('five', 'u', 's')])
@pytest.mark.parametrize('strategy', ['basic', 'directed'])
def test_small_filters_pass_all_properties(graphs, name, left, right, strategy):
    g = graphs[name]
    f = filt(g, left, right, 6, strategy)
    rep = check_filter_properties(f)
    assert tuple(rep.results) == PROPERTIES
    assert rep.ok, rep.lines()
    assert {e.kind for e in f.edges} <= set(EDGE_KINDS)
    for n in f.nodes:
        assert is_geodesic(g, f.tree_word(n.id))


def test_tree_marking_alternates(graphs):
    f = filt(graphs['p5'], 'a', 'c', 5)
    below = f.below()
    for n in f.nodes:
        if len(below[n.id]) == 2:
            right = next(f.edges[e] for e in below[n.id] if f.edges[e].kind == 'right_fan')
            assert right.tree == (n.level % 2 == 1)


def test_p5_deep_tree_paths_geodesic(graphs):
    g = graphs['p5']
    f = filt(g, 'a', 'c', 9)
    for n in f.nodes:
        assert is_geodesic(g, f.tree_word(n.id))
        assert len(f.tree_word(n.id)) == n.level


def test_filter_walls_examples(graphs):
    sq = graphs['square']
    f = filt(sq, 'a', 'b', 2)
    classes = filter_walls(f)
    cls = {e: k for k, c in enumerate(classes) for e in c}
    assert f.loops
    for lp in f.loops:
        assert cls[lp.lower_left] == cls[lp.upper_right]
        assert cls[lp.lower_right] == cls[lp.upper_left]
    assert sorted(e for c in classes for e in c) == list(range(len(f.edges)))


@pytest.mark.parametrize('name, left, right', [('p5', 'a', 'c'), ('six', 's', 't')])
def test_filter_walls_refine_walls(graphs, name, left, right):
    g = graphs[name]
    f = filt(g, left, right, 5)
    for c in filter_walls(f):
        walls = {wall_of(g, EdgeRef(f.nodes[f.edges[e].src].element, f.edges[e].label)) for e in c}
        assert len(walls) == 1


def test_negative_control_flipped_non_tree_flag(graphs):
    f = filt(graphs['p5'], 'a', 'c', 4)
    assert check_filter_properties(f).ok
    for e in [e for e in f.edges if not e.tree][:5]:
        rep = check_filter_properties(flip(f, e.id))
        assert not rep.passed('4')
        assert rep.results['4'] == f'edge {e.id}'


def test_negative_control_dropped_tree_edge(graphs):
    f = filt(graphs['p5'], 'a', 'c', 4)
    e = next(e for e in f.edges if e.tree and e.kind == 'interior')
    rep = check_filter_properties(flip(f, e.id))
    assert not rep.passed('2') and not rep.passed('4')
    assert rep.results['4'] == f'node {e.dst}'


def test_negative_control_wall_mismatch(graphs):
    f = filt(graphs['p5'], 'a', 'c', 3)
    lp = f.loops[0]
    nodes = list(f.nodes)
    top = f.edges[lp.upper_left].dst
    nodes[top] = dataclasses.replace(nodes[top], element=GroupElement(nodes[top].element.word[:-1]))
    rep = check_filter_properties(dataclasses.replace(f, nodes=tuple(nodes)))
    assert not rep.ok


def test_report_lines(graphs):
    rep = check_filter_properties(filt(graphs['p5'], 'a', 'c', 2))
    assert rep.lines()[0] == 'property 1: ok'
    assert len(rep.lines()) == len(PROPERTIES)


def test_directed_differs_on_six(graphs):
    g = graphs['six']
    basic, directed = filt(g, 's', 't', 8), filt(g, 's', 't', 8, 'directed')
    assert check_filter_properties(directed).ok

    def labels(f):
        return [tuple(f.edges[e].label for e in fr.interior) for fr in f.fans]

    assert labels(basic) != labels(directed)


def test_build_filter_errors(graphs):
    p5 = graphs['p5']
    with pytest.raises(FilterError):
        build_filter(p5, (0,), (2,), (), 2)
    with pytest.raises(FilterError):
        build_filter(p5, (0, 0), (2, 1), (), 2)
    with pytest.raises(FilterError):
        build_filter(p5, (0, 2), (0, 3), (), 2)
    with pytest.raises(ValueError):
        build_filter(p5, (0,), (2,), (), 1, strategy='greedy')
    with pytest.raises(ValueError):
        build_filter(p5, (0,), (2,), (), 0)
    sl, sr = spines(p5, 'a', 'c', 8)
    with pytest.raises(FilterError):
        build_filter(p5, sl, sr, (), 8, max_nodes=100)


def test_shared_prefix(graphs):
    g = graphs['p5']
    shared = W(g, 'a c')
    sl, sr = default_spines(g, shared, 4)
    f = build_filter(g, sl, sr, shared, 4)
    assert f.nodes[f.root].element.word == shared
    assert check_filter_properties(f).ok


def test_default_spines_errors(graphs):
    g = graphs['p5']
    with pytest.raises(FilterError):
        default_spines(g, (), 3, first=(0, 0))
    with pytest.raises(FilterError):
        extend_spine(graphs['square'].induced(['a', 'b']), (), (0,), 3)


# export

@pytest.mark.parametrize('strategy', ['basic', 'directed'])
def test_json_round_trip(graphs, strategy):
    f = filt(graphs['six'], 's', 't', 4, strategy)
    text = export_filter(f, 'json')
    g = filter_from_json(text)
    assert g.structure() == f.structure()
    assert export_filter(g, 'json') == text
    doc = json.loads(text)
    assert {'id', 'level', 'element'} == set(doc['nodes'][0])
    assert {'id', 'from', 'to', 'label', 'kind', 'tree'} == set(doc['edges'][0])


def test_dot_marks_non_tree_edges(graphs):
    f = filt(graphs['p5'], 'a', 'c', 3)
    dot = export_filter(f, 'dot')
    dashed = sum('style=dashed' in ln for ln in dot.splitlines())
    assert dashed == sum(not e.tree for e in f.edges)
    with pytest.raises(ValueError):
        export_filter(f, 'graphml')


def test_reproducible(graphs):
    a = export_filter(filt(graphs['p5'], 'a', 'c', 7), 'json')
    b = export_filter(filt(graphs['p5'], 'a', 'c', 7), 'json')
    assert a == b
    assert len(json.loads(a)['nodes']) == len(filt(graphs['p5'], 'a', 'c', 7).nodes)


@given(presentation_graphs(min_n=4, max_n=6), st.integers(1, 4), st.sampled_from(['basic', 'directed']))
def test_random_filters(g, depth, strategy):
    try:
        sl, sr = default_spines(g, (), depth)
        f = build_filter(g, sl, sr, (), depth, strategy, max_nodes=20_000)
    except (FilterError, AvoidPathError):
        assume(False)
    rep = check_filter_properties(f)
    assert rep.ok, rep.lines()
