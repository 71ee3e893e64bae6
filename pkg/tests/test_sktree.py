import pytest
from hypothesis import given, settings, strategies as st

from conftest import graph_by_definition, lift, nlc_trees, random_partition, small_tree
from nlcencode.errors import InputError, ParseError
from nlcencode.semigroup import SkFun
from nlcencode.sktree import (
    Factorization,
    Graph,
    NlcTree,
    RootedTree,
    format_graph,
    format_nlc,
    generate_graph,
    induced_factor,
    kappa,
    parse_graph,
    parse_nlc,
    quotient,
)

PATH = RootedTree({0: None, 1: 0, 2: 1, 3: 1, 4: 0})


def test_rooted_tree_basics():
    assert PATH.root == 0
    assert PATH.children[1] == (2, 3)
    assert PATH.depth == {0: 0, 1: 1, 2: 2, 3: 2, 4: 1}
    assert PATH.ancestors(3) == [3, 1, 0]
    assert PATH.lca(2, 3) == 1 and PATH.lca(2, 4) == 0 and PATH.lca(3, 3) == 3
    assert PATH.is_ancestor(1, 2) and not PATH.is_ancestor(2, 1) and PATH.is_ancestor(2, 2)
    assert PATH.path_edges(3, 0) == [3, 1]
    assert sorted(PATH.subtree(1)) == [1, 2, 3]
    assert PATH.height() == 2


@pytest.mark.parametrize(
    "parent",
    [{0: None, 1: None}, {0: 1, 1: 0}, {0: None, 1: 7}, {}],
)
def test_rooted_tree_rejects_bad_parents(parent):
    with pytest.raises(InputError):
        RootedTree(parent)


def test_path_edges_needs_ancestor():
    with pytest.raises(InputError):
        PATH.path_edges(2, 4)


def test_nlctree_validation():
    f = SkFun.identity(2)
    ok = dict(parent={0: None, 1: 0}, rho={1: f}, attach={5: 1}, color={5: 2}, eta={0: [(1, 2), (2, 1)]})
    NlcTree(2, **ok)
    bad = [
        {**ok, "rho": {}},
        {**ok, "rho": {1: f, 0: f}},
        {**ok, "rho": {1: SkFun.identity(3)}},
        {**ok, "attach": {5: 9}},
        {**ok, "attach": {1: 1}, "color": {1: 1}},
        {**ok, "color": {5: 3}},
        {**ok, "eta": {0: [(1, 2)]}},
        {**ok, "eta": {0: [(1, 3), (3, 1)]}},
    ]
    for kwargs in bad:
        with pytest.raises(InputError):
            NlcTree(2, **kwargs)


@given(nlc_trees())
@settings(max_examples=60, deadline=None)
def test_generate_graph_matches_definition(t):
    g = generate_graph(t)
    assert g.vertices == frozenset(t.attach)
    assert set(g.edges) == graph_by_definition(t)


@given(nlc_trees())
@settings(max_examples=40, deadline=None)
def test_kappa_and_colors_up_agree_with_lifting(t):
    for v in t.vertices:
        expected = lift(t, v)
        assert t.colors_up(v) == dict(expected)
        for a, c in expected:
            assert kappa(t, v, a) == c


def test_kappa_rejects_non_ancestor():
    t = small_tree(3, nodes=5, vertices=3)
    v = t.vertices[0]
    off = next(a for a in t.nodes if not t.tree.is_ancestor(a, t.attach[v]))
    with pytest.raises(InputError):
        kappa(t, v, off)


@given(nlc_trees(), st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_induced_factor_preserves_meets_inside_it(t, seed):
    g = generate_graph(t)
    for part in random_partition(t, seed):
        f = induced_factor(t, part)
        assert set(f.nodes) == set(part)
        fg = generate_graph(f)
        for u in f.vertices:
            for v in f.vertices:
                if u < v and t.tree.lca(t.attach[u], t.attach[v]) in part:
                    assert fg.has_edge(u, v) == g.has_edge(u, v)


@given(nlc_trees(), st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_quotient_labels_compose_to_tree_recolorings(t, seed):
    p = Factorization.of(t, random_partition(t, seed))
    q = quotient(t, p)
    assert set(q.tree.parent) == set(p.tops)
    for top in p.tops:
        for a in q.parts[top]:
            assert p.top_of[a] == top
    for v in t.vertices:
        home = q.varpi[v]
        assert p.top_of[t.attach[v]] == home
        at_home = kappa(t, v, home)
        for y in q.tree.ancestors(home):
            assert q.path_varrho(home, y)(at_home) == kappa(t, v, y)


def test_factorization_validation():
    t = small_tree(1, nodes=4, vertices=0, path_bias=(1, 1))  # a path 0-1-2-3
    with pytest.raises(InputError):
        Factorization.of(t, [[0, 1], [1, 2, 3]])
    with pytest.raises(InputError):
        Factorization.of(t, [[0, 1], [2]])
    with pytest.raises(InputError):
        Factorization.of(t, [[0, 2], [1, 3]])
    p = Factorization.of(t, [[2, 3], [0, 1]])
    assert p.tops == (0, 2)
    assert len(Factorization.singletons(t)) == 4 and len(Factorization.whole(t)) == 1


@given(nlc_trees())
@settings(max_examples=40, deadline=None)
def test_nlc_format_roundtrip(t):
    text = format_nlc(t)
    assert parse_nlc(text) == t
    assert format_nlc(parse_nlc(text)) == text


@given(nlc_trees())
@settings(max_examples=30, deadline=None)
def test_graph_format_roundtrip(t):
    g = generate_graph(t)
    assert parse_graph(format_graph(g)) == g


def test_graph_format_keeps_isolated_vertices():
    g = Graph([1, 2, 3], [(1, 2)])
    assert parse_graph(format_graph(g)).vertices == {1, 2, 3}


@pytest.mark.parametrize(
    "text",
    [
        "",
        "node 0 parent=-\n",
        "nlc k=2\nnode 1 parent=0\n",
        "nlc k=2\nnode 0 parent=- eta=(1,2\n",
        "nlc k=2\nnode 0 parent=-\nbogus 1\n",
        "nlc k=2\nnode 0 parent=-\nvertex 5 node=0\n",
    ],
)
def test_parse_nlc_errors(text):
    with pytest.raises(ParseError):
        parse_nlc(text)


def test_parse_nlc_reports_line_numbers():
    with pytest.raises(ParseError) as info:
        parse_nlc("nlc k=2\n\nnode 0 parent=-\nwhat\n")
    assert info.value.line_no == 4


@pytest.mark.parametrize("text", ["e 1 2\n", "graph n=3 m=1\ne 1 2\n", "graph\ne 1 x\n"])
def test_parse_graph_errors(text):
    with pytest.raises(ParseError):
        parse_graph(text)


def test_graph_rejects_loops_and_strangers():
    with pytest.raises(InputError):
        Graph([1], [(1, 1)])
    with pytest.raises(InputError):
        Graph([1], [(1, 2)])
