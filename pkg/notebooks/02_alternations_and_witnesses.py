"""
Type alternations turn into half-graphs
=======================================

The unstable chain puts a_i and b_i of a half-graph on alternate nodes of a
path under one idempotent label, so the whole tree is a single splendid
factor.  Long alternations in the type sequence of a deep part are turned
back into semi-induced half-graphs.
"""

# %%
from nlcencode.factorize import recursive_factorize
from nlcencode.generate import gen_unstable_chain
from nlcencode.sktree import generate_graph
from nlcencode.verify import (
    extract_halfgraph_witness,
    find_alternation,
    is_semi_induced_halfgraph,
    ladder_index,
    splendid_analyses,
)

t = gen_unstable_chain(8)
g = generate_graph(t)
print("ladder index", ladder_index(g, 10))

# %%
rf = recursive_factorize(t)
_, an = next(splendid_analyses(t, rf))
print("classes", an.gamma.classes)
x = max(an.ytree.parent, key=an.ydepth.get)
for g0 in range(an.ntypes):
    for g1 in range(an.ntypes):
        row = " ".join(str(tp) for _, tp in an.types(x, g0, g1))
        print((g0, g1), row)

# %%
for g0 in range(an.ntypes):
    for g1 in range(an.ntypes):
        for pattern in (1, 2):
            chain = find_alternation(an.types(x, g0, g1), pattern)
            if len(chain) < 4:
                continue
            A, B = extract_halfgraph_witness(an, x, g0, g1, chain, pattern)
            print(f"classes {(g0, g1)} pattern {pattern}: length {len(chain)} -> order {len(A)}",
                  "A", A, "B", B, is_semi_induced_halfgraph(g, A, B))
