"""Independent audits: Gaifman graphs, reachability, ladders, cliques, colorings."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .encode import (
    MINUS,
    PLUS,
    PM,
    EncodedStructure,
    SplendidAnalysis,
)
from .errors import InputError, InvariantViolation, RefusalError
from .factorize import SPLENDID, RecursiveFactorization
from .sktree import Factorization, Graph, NlcTree, generate_graph, induced_factor, quotient

__all__ = [
    "gaifman",
    "subdivide_twice",
    "canonical_ordering",
    "sreach_inf",
    "BoundCheck",
    "BoundAudit",
    "scol_audit",
    "alternation_length",
    "find_alternation",
    "max_alternation",
    "splendid_analyses",
    "check_type_sync",
    "ladder_index",
    "ladder_search",
    "is_semi_induced_halfgraph",
    "extract_halfgraph_witness",
    "clique_number",
    "chi_upper",
    "treewidth_exact",
    "CLIQUE_LIMIT",
]

CLIQUE_LIMIT = 2000


# ------------------------------------------------------------ Gaifman graph


def _fun_pairs(j: EncodedStructure):
    for (level, name), fmap in j.funs.items():
        for a, b in fmap.items():
            if a != b:
                yield level, name, a, b


def gaifman(j: EncodedStructure) -> Graph:
    """Universe V(T) ∪ U; an edge per function entry, root_i entry and ``(u, π(u))``."""
    edges = {(a, b) for _, _, a, b in _fun_pairs(j)}
    for rmap in j.rooti.values():
        edges.update((a, r) for a, r in rmap.items() if a != r)
    edges.update(j.pi.items())
    return Graph(list(j.eta1) + list(j.pi), edges)


def subdivide_twice(g: Graph) -> Graph:
    nxt = max(g.vertices, default=-1) + 1
    verts = list(g.vertices)
    edges = []
    for u, v in sorted(g.edges):
        s, s2 = nxt, nxt + 1
        nxt += 2
        verts += [s, s2]
        edges += [(u, s), (s, s2), (s2, v)]
    return Graph(verts, edges)


def _tree_parent(j: EncodedStructure) -> dict[int, int | None]:
    """Recover T from the top-level parentT map (the top factor is all of T)."""
    parent = {a: None for a in j.eta1}
    parent.update(j.funs.get((j.levels, "parentT"), {}))
    return parent


def canonical_ordering(j: EncodedStructure) -> list[int]:
    """DFS pre-order of T (children by id), then U by id."""
    parent = _tree_parent(j)
    children: dict[int, list[int]] = {a: [] for a in parent}
    roots = []
    for a in sorted(parent):
        if parent[a] is None:
            roots.append(a)
        else:
            children[parent[a]].append(a)
    if len(roots) != 1:
        raise InvariantViolation(f"structure does not describe a single tree (roots {roots})")
    order = []
    stack = [roots[0]]
    while stack:
        a = stack.pop()
        order.append(a)
        stack.extend(reversed(children[a]))
    return order + sorted(j.pi)


def sreach_inf(g: Graph, order, v: int) -> set[int]:
    """Vertices ``w ≤ v`` reachable from ``v`` through vertices ``> v``; includes ``v``."""
    pos = order if isinstance(order, dict) else {w: i for i, w in enumerate(order)}
    if set(pos) != set(g.vertices):
        raise InputError("order must cover exactly the graph's vertices")
    pv = pos[v]
    out = {v}
    seen = {v}
    stack = [v]
    adj = g.adj
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if b in seen:
                continue
            seen.add(b)
            if pos[b] < pv:
                out.add(b)
            else:
                stack.append(b)
    return out


# ------------------------------------------------------------ bound audit


@dataclass(frozen=True)
class BoundCheck:
    name: str
    measured: int
    bound: int
    hard: bool = True

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound

    def line(self) -> str:
        status = "pass" if self.ok else ("FAIL" if self.hard else "over (report-only)")
        return f"{self.name}: {self.measured} <= {self.bound} {status}"


@dataclass
class BoundAudit:
    k: int
    h: int
    h_truncated: bool
    depth: int
    classes_max: int
    nup_slice: dict[int, int] = field(default_factory=dict)
    nup_aggregate: dict[int, int] = field(default_factory=dict)
    nup_kind: dict[int, str] = field(default_factory=dict)
    sreach_max: int = 0
    blocks_max: int = 0
    landmarks_max: int = 0
    lhat_max: int = 0
    alternation_max: int | None = None
    comparable_edges_ok: bool = True
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def hard_ok(self) -> bool:
        return self.comparable_edges_ok and all(c.ok for c in self.checks if c.hard)

    def report(self) -> str:
        trunc = " (truncated at cap)" if self.h_truncated else ""
        lines = [
            f"k={self.k} h={self.h}{trunc} depth={self.depth} classes<={self.classes_max}",
            f"function edges join comparable nodes: {'pass' if self.comparable_edges_ok else 'FAIL'}",
        ]
        lines += [c.line() for c in self.checks]
        return "\n".join(lines) + "\n"


def _level_kinds(j: EncodedStructure) -> dict[int, set[str]]:
    kinds: dict[int, set[str]] = {}
    for tags in j.tags.values():
        for name, value in tags.items():
            level, _, rest = name.partition(".")
            if rest == "kind":
                kinds.setdefault(int(level), set()).add(value)
    return kinds


def _nup_max(tree, depth, order, arcs: dict[int, set[int]]) -> int:
    """max over a of |{b ≺ a} ∩ ⋃_{a' ⪰ a} N↑(a')|."""
    union: dict[int, set[int]] = {}
    best = 0
    for a in reversed(order):
        s = set(arcs.get(a, ()))
        for c in tree.children_of.get(a, ()):
            s |= union.pop(c)
        da = depth[a]
        s = {b for b in s if depth[b] < da}
        union[a] = s
        best = max(best, len(s))
    return best


class _Tree:
    def __init__(self, parent: dict[int, int | None]):
        self.parent = parent
        self.children_of: dict[int, list[int]] = {}
        for a, p in parent.items():
            if p is not None:
                self.children_of.setdefault(p, []).append(a)


def scol_audit(j: EncodedStructure, h: int, k: int, alternation: int | None = None,
               h_truncated: bool = False) -> BoundAudit:
    """Measure N↑ unions, SReach, blocks, Ł, L̂ from J* and compare with the bounds."""
    if h < 1:
        raise InputError("h must be at least 1")
    parent = _tree_parent(j)
    tree = _Tree(parent)
    order_nodes = [a for a in canonical_ordering(j) if a in parent]
    depth = {}
    for a in order_nodes:
        p = parent[a]
        depth[a] = 0 if p is None else depth[p] + 1

    def is_strict_ancestor(b, a):
        while a is not None and depth[a] > depth[b]:
            a = parent[a]
        return a == b and a is not None

    # function entries may point up (parentT) or down (h); either way the two
    # ends must be comparable, and the upper end counts in the lower one's N↑
    upward_ok = all(
        is_strict_ancestor(b, a) or is_strict_ancestor(a, b) for _, _, a, b in _fun_pairs(j)
    )
    upward_ok = upward_ok and all(j.pi[u] in parent for u in j.pi)

    def add_arc(target, a, b):
        lo, hi = (a, b) if depth[a] > depth[b] else (b, a)
        target.setdefault(lo, set()).add(hi)

    # classes per level/factor from the stored partition tags
    n_classes = 1
    for tags in j.tags.values():
        for name, value in tags.items():
            if name.endswith(".classes"):
                n_classes = max(n_classes, len(set(value.split(","))))

    audit = BoundAudit(k, h, h_truncated, j.levels, n_classes, alternation_max=alternation,
                       comparable_edges_ok=upward_ok)
    kinds = _level_kinds(j)
    splendid_limit = 836 * h + 2 * k + 4
    for level in range(2, j.levels + 1):
        common: dict[int, set[int]] = {}
        slices: dict[str, dict[int, set[int]]] = {}
        for (lv, name), fmap in j.funs.items():
            if lv != level:
                continue
            if name.startswith("lhat."):
                key = ".".join(name.split(".")[1:3])
                target = slices.setdefault(key, {})
            else:
                target = common
            for a, b in fmap.items():
                if a != b:
                    add_arc(target, a, b)
        merged_all = {a: set(s) for a, s in common.items()}
        for sl in slices.values():
            for a, s in sl.items():
                merged_all.setdefault(a, set()).update(s)
        per_slice = [_nup_max(tree, depth, order_nodes, common)]
        for sl in slices.values():
            arcs = {a: set(s) for a, s in common.items()}
            for a, s in sl.items():
                arcs.setdefault(a, set()).update(s)
            per_slice.append(_nup_max(tree, depth, order_nodes, arcs))
        audit.nup_slice[level] = max(per_slice)
        audit.nup_aggregate[level] = _nup_max(tree, depth, order_nodes, merged_all)
        lk = kinds.get(level, set())
        audit.nup_kind[level] = "+".join(sorted(lk)) or "none"
        if SPLENDID in lk:
            audit.checks.append(BoundCheck(f"N↑ slice level {level} (splendid)", audit.nup_slice[level], splendid_limit))
            audit.checks.append(BoundCheck(
                f"N↑ aggregate level {level}", audit.nup_aggregate[level],
                n_classes**2 * 836 * h + 2 * k + 4))
        elif lk:
            audit.checks.append(BoundCheck(f"N↑ level {level} (shallow)", audit.nup_slice[level], 2))

    g = gaifman(j)
    order = canonical_ordering(j)
    pos = {w: i for i, w in enumerate(order)}
    audit.sreach_max = max((len(sreach_inf(g, pos, v)) for v in order), default=0)
    ell = j.levels
    audit.checks.append(BoundCheck(
        "SReach (aggregate)", audit.sreach_max, ell * (n_classes**2 * 836 * h + 2 * k + 4) + 1))
    audit.checks.append(BoundCheck(
        "SReach (per-slice literal)", audit.sreach_max, ell * (836 * h + 2 * k + 4) + 1, hard=False))

    # blocks, Ł, L̂ from the stored landmark tags
    counts: dict[tuple, list[int]] = {}
    for a, tags in j.tags.items():
        for name, value in tags.items():
            parts = name.split(".")
            if len(parts) == 5 and parts[1] == "lhat":
                key = (parts[0], parts[2], parts[3], a)
                c = counts.setdefault(key, [0, 0, 0])
                flags = value.split(";", 1)[0]
                c[0] += "T" in flags
                c[1] += "L" in flags
                c[2] += 1
    for c in counts.values():
        audit.blocks_max = max(audit.blocks_max, c[0])
        audit.landmarks_max = max(audit.landmarks_max, c[1])
        audit.lhat_max = max(audit.lhat_max, c[2])
    audit.checks.append(BoundCheck("blocks", audit.blocks_max, 60 * h + 9))
    audit.checks.append(BoundCheck("|Ł|", audit.landmarks_max, 209 * h))
    audit.checks.append(BoundCheck("|L̂|", audit.lhat_max, 836 * h))
    audit.checks.append(BoundCheck("depth", j.levels, 3 * k**k))
    if alternation is not None:
        audit.checks.append(BoundCheck("alternation", alternation, 3 * h))
    return audit


# ------------------------------------------------------------ alternation

_PATTERNS = {
    # pattern: (y coordinate, y symbols, z coordinate, z symbols)
    1: (0, (PLUS, PM), 1, (MINUS, PM)),
    2: (0, (MINUS, PM), 1, (PLUS, PM)),
}


def find_alternation(types, pattern: int) -> list[tuple[int, int]]:
    """Longest chain ``z_ℓ ≺ y_ℓ ≺ … ≺ z_1 ≺ y_1`` in a root-first type list.

    Returns ``[(y_1, z_1), (y_2, z_2), ...]``; greedy from the deepest node
    is optimal for alternating subsequences.
    """
    yc, ys, zc, zs = _PATTERNS[pattern]
    out = []
    want_y = True
    cur = None
    for node, tp in reversed(types):
        sym = tp.symbols
        if want_y and sym[yc] in ys:
            cur = node
            want_y = False
        elif not want_y and sym[zc] in zs:
            out.append((cur, node))
            want_y = True
    return out


def alternation_length(types) -> int:
    return max(len(find_alternation(types, p)) for p in _PATTERNS)


def splendid_analyses(t: NlcTree, rf: RecursiveFactorization):
    """``(factor, SplendidAnalysis)`` for every splendid factor of the hierarchy."""
    for f in rf.factors:
        if f.kind != SPLENDID:
            continue
        sub = induced_factor(t, f.nodes)
        p = Factorization.of(sub.tree, [rf.factors[c].nodes for c in f.children])
        yield f, SplendidAnalysis(sub, quotient(sub, p))


def max_alternation(t: NlcTree, rf: RecursiveFactorization) -> int:
    best = 0
    for _, an in splendid_analyses(t, rf):
        for x in an.ytree.parent:
            for g0 in range(an.ntypes):
                for g1 in range(an.ntypes):
                    best = max(best, alternation_length(an.types(x, g0, g1)))
    return best


def check_type_sync(an: SplendidAnalysis) -> int:
    """Count literal type disagreements between parts below a common meet."""
    bad = 0
    parts = sorted(an.ytree.parent)
    for x0, x1 in combinations(parts, 2):
        meet = an.ytree.lca(x0, x1)
        for y in an.P(meet):
            for g0 in range(an.ntypes):
                for g1 in range(an.ntypes):
                    if an.compute_type(x0, g0, g1, y) != an.compute_type(x1, g0, g1, y):
                        bad += 1
    return bad


def extract_halfgraph_witness(an: SplendidAnalysis, x: int, g0: int, g1: int,
                              chain: list[tuple[int, int]], pattern: int):
    """Semi-induced half-graph ``(A, B)`` of order ⌊(ℓ-1)/3⌋ from an alternation.

    ``chain`` is ``[(y_1, z_1), ..., (y_ℓ, z_ℓ)]`` (deepest first).  ``v_i`` is
    a γ1-vertex meeting ``x`` at ``y_i`` and ``w_i`` a γ0-vertex meeting ``x``
    at ``z_i``, chosen adjacent or not as the pattern dictates.
    """
    ell = len(chain)
    n = (ell - 1) // 3
    y_adj = pattern == 1

    def pick(node, cls, view, want):
        for v in an._meeting(x, node):
            if an.vclass[v] == cls and an.gamma_adjacent(x, view, node, v) == want:
                return v
        raise InvariantViolation(f"no witness vertex at {node} (pattern {pattern})")

    v = {i: pick(y, g1, g0, y_adj) for i, (y, _) in enumerate(chain, start=1)}
    w = {i: pick(z, g0, g1, not y_adj) for i, (_, z) in enumerate(chain, start=1)}
    if pattern == 1:
        A = [w[3 * i - 1] for i in range(1, n + 1)]
        B = [v[3 * i + 1] for i in range(1, n + 1)]
    else:
        A = [v[3 * i - 2] for i in range(1, n + 1)]
        B = [w[3 * i - 1] for i in range(1, n + 1)]
    if not is_semi_induced_halfgraph(generate_graph(an.t), A, B):
        raise InvariantViolation(f"extracted witness of order {n} fails the half-graph check")
    return A, B


# ------------------------------------------------------------ ladder index


def is_semi_induced_halfgraph(g: Graph, A, B) -> bool:
    if len(A) != len(B) or len(set(A) | set(B)) != 2 * len(A):
        return False
    return all(g.has_edge(a, b) == (i <= jj) for i, a in enumerate(A) for jj, b in enumerate(B))


def _room(cands: int, other: int, nb) -> int:
    """Largest r such that the r best degrees into ``other`` reach r, r-1, ..., 1."""
    degs = sorted(((nb[i] & other).bit_count() for i in _bits(cands)), reverse=True)
    r = 0
    while r < len(degs) and all(degs[m] >= r + 1 - m for m in range(r + 1)):
        r += 1
    return r


def _bits(m: int):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _twin_keys(i: int, nbi: int, live: int, flags) -> tuple:
    return (("open", nbi & live, flags), ("closed", (nbi | 1 << i) & live, flags))


def ladder_index(g: Graph, cap: int) -> int:
    """Largest half-graph order ``n <= cap`` appearing semi-induced in ``g``."""
    return ladder_search(g, cap)[0]


def ladder_search(g: Graph, cap: int, budget: int | None = None) -> tuple[int, bool]:
    """``(order, exact)``; with a node budget the order may be a lower bound.

    Pairs ``(a_i, b_i)`` are appended at the end: a new ``a`` must miss every
    earlier ``b``, a new ``b`` must see every ``a``.  Candidate sets are
    bitsets.  Vertices that are twins inside the live candidates play
    interchangeable roles, so only one per twin class is tried, and a
    degree-sequence bound cuts branches that cannot beat the best order.
    """
    if cap < 0:
        raise InputError("cap must be non-negative")
    verts = sorted(g.vertices, key=lambda v: (-len(g.adj[v]), v))
    idx = {v: i for i, v in enumerate(verts)}
    nb = [0] * len(verts)
    for v in verts:
        for u in g.adj[v]:
            nb[idx[v]] |= 1 << idx[u]
    best = 0
    limit: dict[tuple[int, int], int] = {}
    nodes = 0

    class _OutOfBudget(Exception):
        pass

    def grow(n, acand, bcand, used):
        nonlocal best, nodes
        if n > best:
            best = n
        if best >= cap:
            return
        nodes += 1
        if budget is not None and nodes > budget:
            raise _OutOfBudget
        acand &= ~used
        bcand &= ~used
        key = (acand, bcand)
        if n + limit.get(key, cap) <= best:
            return
        if n + min(acand.bit_count(), bcand.bit_count()) <= best:
            return
        if n + min(_room(acand, bcand, nb), _room(bcand, acand, nb)) <= best:
            return
        live = acand | bcand
        tried_a: set = set()
        for ai in sorted(_bits(acand), key=lambda i: -(nb[i] & bcand).bit_count()):
            keys = _twin_keys(ai, nb[ai], live, bool(bcand >> ai & 1))
            if keys[0] in tried_a or keys[1] in tried_a:
                continue
            tried_a.update(keys)
            a_rest = acand & ~(1 << ai)
            live_b = live & ~(1 << ai)
            tried_b: set = set()
            for bi in sorted(_bits(bcand & nb[ai]), key=lambda i: (nb[i] & acand).bit_count()):
                keys = _twin_keys(bi, nb[bi], live_b, bool(a_rest >> bi & 1))
                if keys[0] in tried_b or keys[1] in tried_b:
                    continue
                tried_b.update(keys)
                grow(n + 1, a_rest & ~nb[bi], bcand & nb[ai], used | (1 << ai) | (1 << bi))
                if best >= cap:
                    return
        # exhausted: nothing below this state beats ``best``
        limit[key] = best - n

    full = (1 << len(verts)) - 1
    try:
        grow(0, full, full, 0)
    except _OutOfBudget:
        return best, False
    return best, True


# ------------------------------------------------------------ cliques, colors


def clique_number(g: Graph, limit: int = CLIQUE_LIMIT) -> int:
    """Exact ω(G): branch and bound with a greedy-coloring bound."""
    if g.n > limit:
        raise RefusalError(f"clique_number refuses graphs with more than {limit} vertices")
    verts = sorted(g.vertices)
    idx = {v: i for i, v in enumerate(verts)}
    nb = [0] * len(verts)
    for v in verts:
        for u in g.adj[v]:
            nb[idx[v]] |= 1 << idx[u]
    best = 0

    def color_bound(cand):
        """Greedy coloring of ``cand``; yields (vertex, color) in increasing color."""
        out = []
        color = 0
        rest = cand
        while rest:
            color += 1
            avail = rest
            while avail:
                low = avail & -avail
                i = low.bit_length() - 1
                out.append((i, color))
                rest &= ~low
                avail &= ~low & ~nb[i]
        return out

    def expand(size, cand):
        nonlocal best
        for i, color in reversed(color_bound(cand)):
            if size + color <= best:
                return
            nxt = cand & nb[i]
            if nxt:
                expand(size + 1, nxt)
            elif size + 1 > best:
                best = size + 1
            cand &= ~(1 << i)

    if verts:
        expand(0, (1 << len(verts)) - 1)
    return best


def chi_upper(g: Graph) -> int:
    """Greedy coloring along a smallest-last (degeneracy) order."""
    if g.n == 0:
        return 0
    deg = {v: len(g.adj[v]) for v in g.vertices}
    alive = set(g.vertices)
    order = []
    while alive:
        v = min(alive, key=lambda u: (deg[u], u))
        order.append(v)
        alive.remove(v)
        for u in g.adj[v]:
            if u in alive:
                deg[u] -= 1
    color: dict[int, int] = {}
    for v in reversed(order):
        taken = {color[u] for u in g.adj[v] if u in color}
        c = 1
        while c in taken:
            c += 1
        color[v] = c
    return max(color.values())


def treewidth_exact(g: Graph, limit: int = 20) -> int:
    """Exact treewidth by branch and bound over elimination orders.

    Simplicial vertices are eliminated eagerly, which never hurts.
    """
    if g.n > limit:
        raise RefusalError(f"treewidth_exact refuses graphs with more than {limit} vertices")
    if g.n == 0:
        return -1
    adj0 = {v: set(g.adj[v]) for v in g.vertices}
    best = [_min_degree_width(adj0)]
    seen: dict[frozenset, int] = {}

    def eliminate(adj, v):
        nbrs = adj[v]
        new = {u: set(s) for u, s in adj.items() if u != v}
        for u in nbrs:
            new[u].discard(v)
            new[u] |= nbrs - {u}
        return new

    def search(adj, width):
        if width >= best[0]:
            return
        if len(adj) <= width + 1:
            best[0] = width
            return
        key = frozenset(adj)
        if seen.get(key, 1 << 30) <= width:
            return
        seen[key] = width
        for v in sorted(adj, key=lambda u: (len(adj[u]), u)):
            nbrs = adj[v]
            if all(b in adj[a] for a, b in combinations(nbrs, 2)):
                search(eliminate(adj, v), max(width, len(nbrs)))
                return
        for v in sorted(adj, key=lambda u: (len(adj[u]), u)):
            w = max(width, len(adj[v]))
            if w < best[0]:
                search(eliminate(adj, v), w)

    search(adj0, 0)
    return best[0]


def _min_degree_width(adj) -> int:
    adj = {v: set(s) for v, s in adj.items()}
    width = 0
    while adj:
        v = min(adj, key=lambda u: (len(adj[u]), u))
        nbrs = adj.pop(v)
        width = max(width, len(nbrs))
        for u in nbrs:
            adj[u].discard(v)
            adj[u] |= nbrs - {u}
    return width
