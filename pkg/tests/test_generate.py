from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from nlcencode.errors import GenerationError, InputError, RefusalError
from nlcencode.generate import (
    LABEL_POOLS,
    GenConfig,
    brute_force_nlc,
    gen_halfgraph,
    gen_random,
    gen_unstable_chain,
    half_graph,
)
from nlcencode.rng import Rng, splitmix64
from nlcencode.sktree import Graph, format_nlc, generate_graph
from nlcencode.verify import is_semi_induced_halfgraph, ladder_index


def test_splitmix_reference_value():
    # first output of the reference splitmix64 seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_rng_stream_is_pinned():
    r = Rng(0)
    assert [r.next_u64() for _ in range(3)] == [
        8916199331640804048,
        16032783972208265725,
        12954103179475586193,
    ]


@given(st.integers(0, 2**64 - 1), st.integers(1, 1000))
def test_rng_ranges(seed, n):
    r = Rng(seed)
    for _ in range(20):
        assert 0 <= r.below(n) < n
        assert 3 <= r.randint(3, 3 + n) <= 3 + n
        assert 0.0 <= r.random() < 1.0
    assert Rng(seed).next_u64() == Rng(seed).next_u64()


def test_rng_edge_cases():
    r = Rng(5)
    with pytest.raises(ValueError):
        r.below(0)
    assert not any(r.chance(0, 3) for _ in range(50))
    assert all(r.chance(3, 3) for _ in range(50))
    assert Rng(1).fork(7).next_u64() == Rng(1).fork(7).next_u64()
    assert Rng(1).fork(7).next_u64() != Rng(1).fork(8).next_u64()


@pytest.mark.parametrize(
    "kwargs",
    [
        {"k": 0},
        {"tree_nodes": 0},
        {"vertices": -1},
        {"eta_density": Fraction(3, 2)},
        {"label_pool": "odd"},
        {"reject_ladder_above": -1},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(InputError):
        GenConfig(**kwargs)


@given(
    st.integers(1, 4),
    st.integers(1, 30),
    st.integers(0, 30),
    st.sampled_from([Fraction(0), Fraction(1, 5), Fraction(1, 2), Fraction(1)]),
    st.sampled_from(LABEL_POOLS),
    st.integers(0, 10**6),
)
@settings(max_examples=60, deadline=None)
def test_gen_random_is_valid_and_deterministic(k, nodes, vertices, density, pool, seed):
    cfg = GenConfig(k, nodes, vertices, density, pool, seed)
    t = gen_random(cfg)
    assert len(t.tree) == nodes and len(t.attach) == vertices and t.k == k
    assert format_nlc(gen_random(cfg)) == format_nlc(t)
    for pairs in t.eta.values():
        assert all((j, i) in pairs for i, j in pairs)
    if density == 0:
        assert not any(t.eta.values())
    if pool == "constants":
        assert all(len(set(f.table)) == 1 for f in t.rho.values())


def test_different_seeds_differ():
    texts = {format_nlc(gen_random(GenConfig(seed=s))) for s in range(10)}
    assert len(texts) == 10


def test_rejection_by_ladder_index():
    cfg = GenConfig(k=2, tree_nodes=8, vertices=10, seed=3, reject_ladder_above=2)
    t = gen_random(cfg)
    assert ladder_index(generate_graph(t), 3) <= 2
    with pytest.raises(GenerationError):
        gen_random(GenConfig(k=3, tree_nodes=4, vertices=40, seed=1, reject_ladder_above=0, max_attempts=3))


@pytest.mark.parametrize("n", range(1, 7))
def test_half_graph_generators(n):
    g, a, b = half_graph(n)
    assert g.m == n * (n + 1) // 2 and is_semi_induced_halfgraph(g, a, b)
    for gen in (gen_halfgraph, gen_unstable_chain):
        t = gen(n)
        gt = generate_graph(t)
        assert gt.vertices == frozenset(t.attach)
        assert ladder_index(gt, n + 1) == n
        assert gt.m == n * (n + 1) // 2
    assert len(gen_unstable_chain(n, tail=3).tree) == 2 * n + 3


def test_generator_arguments():
    with pytest.raises(InputError):
        gen_halfgraph(0)
    with pytest.raises(InputError):
        gen_unstable_chain(0)
    assert gen_halfgraph(3, k_min=5).k == 5


def _graphs_up_to(n):
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield Graph(range(n), [p for i, p in enumerate(pairs) if mask >> i & 1])


def test_brute_force_examples():
    p3 = Graph(range(3), [(0, 1), (1, 2)])
    t = brute_force_nlc(p3, 2)
    assert t is not None and generate_graph(t) == p3
    triangle = Graph(range(3), combinations(range(3), 2))
    t = brute_force_nlc(triangle, 1)
    assert t is not None and len(t.tree) == 1 and generate_graph(t) == triangle
    c5 = Graph(range(5), [(i, (i + 1) % 5) for i in range(5)])
    assert brute_force_nlc(c5, 1) is None
    t = brute_force_nlc(c5, 3)
    assert t is not None and generate_graph(t) == c5


def test_brute_force_finds_every_four_vertex_graph_at_k2():
    for g in _graphs_up_to(4):
        t = brute_force_nlc(g, 2)
        assert t is not None and generate_graph(t) == g


def test_brute_force_refuses_large_inputs():
    with pytest.raises(RefusalError):
        brute_force_nlc(Graph(range(9)), 2)
    with pytest.raises(RefusalError):
        brute_force_nlc(Graph(range(3)), 4)
