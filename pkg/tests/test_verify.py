from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import small_tree
from nlcencode.encode import MINUS, PLUS, PM, VOID, PairType, encode_recursive
from nlcencode.errors import InputError, InvariantViolation, RefusalError
from nlcencode.factorize import recursive_factorize
from nlcencode.generate import gen_halfgraph, gen_unstable_chain, half_graph
from nlcencode.rng import Rng
from nlcencode.sktree import Graph, generate_graph
from nlcencode.verify import (
    BoundCheck,
    canonical_ordering,
    chi_upper,
    clique_number,
    extract_halfgraph_witness,
    find_alternation,
    gaifman,
    is_semi_induced_halfgraph,
    ladder_index,
    ladder_search,
    scol_audit,
    splendid_analyses,
    sreach_inf,
    subdivide_twice,
    treewidth_exact,
)


def random_graph(seed, n, num=1, den=2):
    r = Rng(seed)
    return Graph(range(n), [(u, v) for u, v in combinations(range(n), 2) if r.chance(num, den)])


graphs = st.builds(
    random_graph, st.integers(0, 10**6), st.integers(0, 9), st.integers(1, 3), st.just(4)
)


# ------------------------------------------------------------ oracles


def sreach_by_paths(g, order, v):
    """Every simple path from v whose inner vertices come after v."""
    pos = {w: i for i, w in enumerate(order)}
    out = {v}

    def walk(a, seen):
        for b in g.adj[a]:
            if b in seen:
                continue
            if pos[b] < pos[v]:
                out.add(b)
            else:
                walk(b, seen | {b})

    walk(v, {v})
    return out


def ladder_by_subsets(g):
    """Largest t with disjoint A, B (|A| = |B| = t) forming a semi-induced half-graph.

    In a half-graph the degrees into the other side are t, t-1, ..., 1, so
    the orderings of A and B are forced by degree.
    """
    verts = sorted(g.vertices)
    n = len(verts)
    best = 0
    for mask_a in range(1, 1 << n):
        A = [verts[i] for i in range(n) if mask_a >> i & 1]
        t = len(A)
        if t <= best or 2 * t > n:
            continue
        rest = [verts[i] for i in range(n) if not mask_a >> i & 1]
        for B in combinations(rest, t):
            a_sorted = sorted(A, key=lambda a: -sum(g.has_edge(a, b) for b in B))
            b_sorted = sorted(B, key=lambda b: sum(g.has_edge(a, b) for a in A))
            if is_semi_induced_halfgraph(g, a_sorted, b_sorted):
                best = t
                break
    return best


def clique_by_subsets(g):
    verts = sorted(g.vertices)
    best = 0
    for mask in range(1 << len(verts)):
        s = [verts[i] for i in range(len(verts)) if mask >> i & 1]
        if len(s) > best and all(g.has_edge(u, v) for u, v in combinations(s, 2)):
            best = len(s)
    return best


def treewidth_by_orders(g):
    if g.n == 0:
        return -1
    best = g.n
    for order in permutations(sorted(g.vertices)):
        adj = {v: set(g.adj[v]) for v in g.vertices}
        width = 0
        for v in order:
            nbrs = adj.pop(v)
            width = max(width, len(nbrs))
            for u in nbrs:
                adj[u] |= nbrs - {u}
                adj[u].discard(v)
        best = min(best, width)
    return best


# ------------------------------------------------------------ Gaifman, orderings


@pytest.fixture(scope="module")
def small_structure():
    t = small_tree(9, k=2, nodes=10, vertices=6)
    return t, encode_recursive(t, recursive_factorize(t))


def test_gaifman_contains_every_relation_pair(small_structure):
    t, j = small_structure
    g = gaifman(j)
    assert g.vertices == frozenset(t.nodes) | frozenset(t.vertices)
    for fmap in j.funs.values():
        for a, b in fmap.items():
            assert a == b or g.has_edge(a, b)
    for v in t.vertices:
        assert g.has_edge(v, t.attach[v])
    for a, p in t.tree.parent.items():
        if p is not None:
            assert g.has_edge(a, p)


def test_gaifman_of_a_single_node():
    t = small_tree(0, nodes=1, vertices=2)
    g = gaifman(encode_recursive(t, recursive_factorize(t)))
    assert sorted(g.edges) == [(0, 1), (0, 2)]


@given(graphs)
def test_subdivide_twice_counts(g):
    s = subdivide_twice(g)
    assert s.n == g.n + 2 * g.m and s.m == 3 * g.m
    assert all(len(s.adj[v]) == 2 for v in s.vertices - g.vertices)
    assert all(len(s.adj[v]) == len(g.adj[v]) for v in g.vertices)
    assert not any(s.has_edge(u, v) for u, v in g.edges)


def test_canonical_ordering_is_preorder_then_vertices(small_structure):
    t, j = small_structure
    order = canonical_ordering(j)
    assert order == t.tree.preorder + t.vertices


@given(graphs, st.randoms(use_true_random=False))
@settings(max_examples=80)
def test_sreach_matches_path_enumeration(g, rnd):
    order = sorted(g.vertices)
    rnd.shuffle(order)
    for v in order:
        assert sreach_inf(g, order, v) == sreach_by_paths(g, order, v)


def test_sreach_rejects_partial_orders():
    with pytest.raises(InputError):
        sreach_inf(Graph([1, 2], [(1, 2)]), [1], 1)


# ------------------------------------------------------------ audit


def test_scol_audit_passes_on_small_instances():
    for seed in range(4):
        t = small_tree(seed, k=2 + seed % 2, nodes=20, vertices=16)
        j = encode_recursive(t, recursive_factorize(t))
        h = max(1, ladder_index(generate_graph(t), 8))
        audit = scol_audit(j, h, t.k)
        assert audit.hard_ok, audit.report()
        assert "SReach (aggregate)" in audit.report()


def test_scol_audit_flags_violations():
    t = gen_unstable_chain(4)
    j = encode_recursive(t, recursive_factorize(t))
    audit = scol_audit(j, 1, t.k, alternation=99)
    assert not audit.hard_ok
    assert any(c.name == "alternation" and not c.ok for c in audit.checks)
    with pytest.raises(InputError):
        scol_audit(j, 0, t.k)


def test_bound_check_lines():
    assert BoundCheck("x", 3, 4).line() == "x: 3 <= 4 pass"
    assert BoundCheck("x", 5, 4).line().endswith("FAIL")
    assert BoundCheck("x", 5, 4, hard=False).line().endswith("over (report-only)")


# ------------------------------------------------------------ alternation and witnesses


def test_find_alternation_greedy():
    tp = PairType
    types = [(0, tp(VOID, MINUS)), (1, tp(PLUS, VOID)), (2, tp(VOID, PM)), (3, tp(PM, VOID))]
    assert find_alternation(types, 1) == [(3, 2), (1, 0)]
    assert find_alternation(types, 2) == [(3, 2)]


@pytest.mark.parametrize("n", [5, 8])
def test_witnesses_from_unstable_chain(n):
    t = gen_unstable_chain(n)
    g = generate_graph(t)
    found = 0
    for _, an in splendid_analyses(t, recursive_factorize(t)):
        for x in an.ytree.parent:
            for g0 in range(an.ntypes):
                for g1 in range(an.ntypes):
                    types = an.types(x, g0, g1)
                    for pattern in (1, 2):
                        chain = find_alternation(types, pattern)
                        for lo in range(len(chain)):
                            for hi in range(lo + 4, len(chain) + 1):
                                A, B = extract_halfgraph_witness(an, x, g0, g1, chain[lo:hi], pattern)
                                assert len(A) == (hi - lo - 1) // 3
                                assert is_semi_induced_halfgraph(g, A, B)
                                found += 1
    assert found > 0


def test_witness_extraction_rejects_fake_chains():
    t = gen_unstable_chain(5)
    _, an = next(splendid_analyses(t, recursive_factorize(t)))
    x = max(an.ytree.parent, key=an.ydepth.get)
    fake = [(y, y) for y in an.P(x)][:4]
    with pytest.raises(InvariantViolation):
        extract_halfgraph_witness(an, x, 0, 0, fake, 1)


# ------------------------------------------------------------ ladder index


@pytest.mark.parametrize("n", range(1, 7))
def test_ladder_of_half_graphs(n):
    assert ladder_index(half_graph(n)[0], n + 1) == n
    assert ladder_index(generate_graph(gen_halfgraph(n)), n + 1) == n


def test_ladder_small_cases():
    k33 = Graph(range(6), [(a, b) for a in range(3) for b in range(3, 6)])
    assert ladder_index(k33, 8) == 1
    assert ladder_index(Graph(range(7)), 8) == 0
    assert ladder_index(Graph([]), 8) == 0
    assert ladder_index(half_graph(5)[0], 3) == 3


@given(graphs)
@settings(max_examples=120, deadline=None)
def test_ladder_matches_subset_oracle(g):
    assert ladder_index(g, 8) == ladder_by_subsets(g)


@given(graphs, st.integers(1, 50))
@settings(max_examples=60, deadline=None)
def test_budgeted_ladder_is_a_lower_bound(g, budget):
    h, exact = ladder_search(g, 8, budget)
    full = ladder_index(g, 8)
    assert h <= full
    if exact:
        assert h == full


@given(graphs, st.integers(0, 9))
@settings(max_examples=60, deadline=None)
def test_ladder_is_monotone_under_induced_subgraphs(g, drop):
    keep = [v for v in g.vertices if v != drop]
    assert ladder_index(g.induced(keep), 8) <= ladder_index(g, 8)


# ------------------------------------------------------------ cliques, colorings, treewidth


@given(st.builds(random_graph, st.integers(0, 10**6), st.integers(0, 12), st.integers(1, 3), st.just(4)))
@settings(max_examples=60, deadline=None)
def test_clique_matches_subset_oracle(g):
    omega = clique_number(g)
    assert omega == clique_by_subsets(g)
    assert omega <= chi_upper(g)


def test_chi_examples():
    c5 = Graph(range(5), [(i, (i + 1) % 5) for i in range(5)])
    assert chi_upper(c5) == 3 and clique_number(c5) == 2
    assert chi_upper(half_graph(6)[0]) == 2
    assert chi_upper(Graph([])) == 0 and clique_number(Graph([])) == 0
    assert chi_upper(Graph([1, 2])) == 1


@given(graphs)
def test_chi_upper_is_a_proper_coloring_bound(g):
    chi = chi_upper(g)
    assert chi <= max((len(g.adj[v]) for v in g.vertices), default=-1) + 1


def test_refusals():
    with pytest.raises(RefusalError):
        clique_number(Graph(range(5)), limit=4)
    with pytest.raises(RefusalError):
        treewidth_exact(Graph(range(21)))


@given(st.builds(random_graph, st.integers(0, 10**6), st.integers(0, 7), st.integers(1, 3), st.just(4)))
@settings(max_examples=60, deadline=None)
def test_treewidth_matches_order_oracle(g):
    assert treewidth_exact(g) == treewidth_by_orders(g)


def test_treewidth_examples():
    grid = Graph(range(9), [(i, i + 1) for i in range(9) if i % 3 != 2] + [(i, i + 3) for i in range(6)])
    assert treewidth_exact(grid) == 3
    assert treewidth_exact(Graph(range(6), combinations(range(6), 2))) == 5
    assert treewidth_exact(Graph(range(8), [(i, i + 1) for i in range(7)])) == 1
    assert treewidth_exact(Graph(range(8), [(i, (i + 1) % 8) for i in range(8)])) == 2
    assert treewidth_exact(Graph(range(4))) == 0
