from itertools import combinations

import pytest
from hypothesis import strategies as st

from nlcencode.rng import Rng
from nlcencode.semigroup import SkFun, all_functions, is_idempotent
from nlcencode.sktree import NlcTree


def small_tree(seed, k=2, nodes=8, vertices=10, path_bias=(3, 4), ramsey=False, density=(1, 2)):
    """A small random k-NLC-tree; with ``ramsey`` all labels share one kernel."""
    r = Rng(seed)
    parent = {0: None}
    for i in range(1, nodes):
        parent[i] = i - 1 if r.chance(*path_bias) else r.below(i)
    if ramsey:
        by_kernel = {}
        for f in all_functions(k):
            if is_idempotent(f):
                by_kernel.setdefault(f.kernel(), []).append(f)
        pool = r.choice(sorted(by_kernel.values(), key=str))
        rho = {i: r.choice(pool) for i in range(1, nodes)}
    else:
        rho = {i: SkFun(k, tuple(r.randint(1, k) for _ in range(k))) for i in range(1, nodes)}
    eta = {}
    for a in range(nodes):
        pairs = set()
        for i in range(1, k + 1):
            for j in range(i, k + 1):
                if r.chance(*density):
                    pairs |= {(i, j), (j, i)}
        eta[a] = pairs
    attach = {nodes + v: r.below(nodes) for v in range(vertices)}
    color = {nodes + v: r.randint(1, k) for v in range(vertices)}
    return NlcTree(k, parent, rho, attach, color, eta)


@st.composite
def nlc_trees(draw, max_nodes=10, max_vertices=12, ks=(1, 2, 3), ramsey=None):
    seed = draw(st.integers(0, 2**32))
    k = draw(st.sampled_from(ks))
    nodes = draw(st.integers(1, max_nodes))
    vertices = draw(st.integers(0, max_vertices))
    use_ramsey = draw(st.booleans()) if ramsey is None else ramsey
    return small_tree(seed, k, nodes, vertices, ramsey=use_ramsey)


def lift(t: NlcTree, v: int):
    """[(node, color)] from the attachment point of v up to the root."""
    a, c = t.attach[v], t.color[v]
    out = [(a, c)]
    while t.tree.parent[a] is not None:
        c = t.rho[a].table[c - 1]
        a = t.tree.parent[a]
        out.append((a, c))
    return out


def graph_by_definition(t: NlcTree):
    """Adjacency straight from the definition: lift both colors to the meet."""
    edges = set()
    for u, v in combinations(sorted(t.attach), 2):
        lu, lv = dict(lift(t, u)), lift(t, v)
        meet, cv = next((a, c) for a, c in lv if a in lu)
        if (lu[meet], cv) in t.eta[meet]:
            edges.add((u, v))
    return edges


def random_partition(t: NlcTree, seed: int):
    """Connected parts: every non-root node starts a new part with probability 1/2."""
    r = Rng(seed)
    tops = {a for a in t.tree.preorder if a == t.root or r.chance(1, 2)}
    owner = {}
    for a in t.tree.preorder:
        owner[a] = a if a in tops else owner[t.tree.parent[a]]
    parts = {}
    for a, top in owner.items():
        parts.setdefault(top, set()).add(a)
    return list(parts.values())


@pytest.fixture
def halfgraph5():
    from nlcencode.generate import gen_unstable_chain

    return gen_unstable_chain(5)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
