"""
Encoding a small NLC-tree and reading adjacency back
=====================================================

A random 2-NLC-tree is factorized, encoded into the flat structure J*, printed
and reparsed, and then every vertex pair is decoded without touching the tree.
"""

# %%
from nlcencode.decode import decode_adjacent, decode_full
from nlcencode.encode import encode_recursive, parse_structure, serialize_structure
from nlcencode.factorize import format_hierarchy, recursive_factorize, verify_hierarchy
from nlcencode.generate import GenConfig, gen_random
from nlcencode.sktree import format_nlc, generate_graph

t = gen_random(GenConfig(k=2, tree_nodes=12, vertices=10, seed=3))
print(format_nlc(t))

# %%
# the hierarchy: every non-leaf factor has a splendid or shallow quotient
rf = recursive_factorize(t)
audit = verify_hierarchy(rf)
print(format_hierarchy(rf))
print("depth", audit.depth, "bound", audit.depth_bound, "kinds", audit.kinds)

# %%
# J* is plain text; only this text is handed to the decoder
text = serialize_structure(encode_recursive(t, rf))
print(len(text.splitlines()), "records")
print("\n".join(text.splitlines()[:12]))

# %%
j = parse_structure(text)
g = generate_graph(t)
back = decode_full(j)
print("edges", g.m, "decoded", back.m, "same graph:", g == back)

# %%
# one query, level by level
u, v = t.vertices[:2]
lines = []
print(u, v, decode_adjacent(j, u, v, trace=lines))
print("\n".join(lines))
