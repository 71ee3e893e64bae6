"""Deterministic instance generators and a tiny-graph NLC-tree search."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .errors import GenerationError, InputError, RefusalError
from .rng import Rng
from .semigroup import SkFun, all_functions, is_idempotent
from .sktree import Graph, NlcTree, generate_graph

__all__ = [
    "GenConfig",
    "LABEL_POOLS",
    "gen_random",
    "gen_halfgraph",
    "gen_unstable_chain",
    "half_graph",
    "brute_force_nlc",
]

LABEL_POOLS = ("all", "constants", "ramsey-biased")


@dataclass(frozen=True)
class GenConfig:
    k: int = 2
    tree_nodes: int = 10
    vertices: int = 20
    eta_density: Fraction = Fraction(1, 2)
    label_pool: str = "all"
    seed: int = 0
    reject_ladder_above: int | None = None
    max_attempts: int = 200

    def __post_init__(self):
        object.__setattr__(self, "eta_density", Fraction(self.eta_density))
        if self.k < 1:
            raise InputError("k must be at least 1")
        if self.tree_nodes < 1 or self.vertices < 0:
            raise InputError("tree_nodes must be positive and vertices non-negative")
        if not 0 <= self.eta_density <= 1:
            raise InputError("eta_density must lie in [0, 1]")
        if self.label_pool not in LABEL_POOLS:
            raise InputError(f"label_pool must be one of {LABEL_POOLS}")
        if self.reject_ladder_above is not None and self.reject_ladder_above < 0:
            raise InputError("reject_ladder_above must be non-negative")


def _label_sampler(cfg: GenConfig, rng: Rng):
    k = cfg.k
    if cfg.label_pool == "constants":
        return lambda: SkFun.constant(k, rng.randint(1, k))
    if cfg.label_pool == "all":
        return lambda: SkFun(k, tuple(rng.randint(1, k) for _ in range(k)))
    # ramsey-biased: mostly idempotents sharing one kernel drawn per instance
    pool = [f for f in all_functions(k) if is_idempotent(f)] if k <= 5 else []
    by_kernel: dict = {}
    for f in pool:
        by_kernel.setdefault(f.kernel(), []).append(f)
    kernels = sorted(by_kernel)
    favored = by_kernel[rng.choice(kernels)] if kernels else []

    def draw():
        if favored and rng.chance(3, 4):
            return rng.choice(favored)
        return SkFun(k, tuple(rng.randint(1, k) for _ in range(k)))

    return draw


def _draw(cfg: GenConfig, rng: Rng) -> NlcTree:
    n, k = cfg.tree_nodes, cfg.k
    parent: dict[int, int | None] = {0: None}
    for i in range(1, n):
        parent[i] = i - 1 if rng.chance(1, 2) else rng.below(i)
    label = _label_sampler(cfg, rng)
    rho = {i: label() for i in range(1, n)}
    num, den = cfg.eta_density.numerator, cfg.eta_density.denominator
    eta = {}
    for a in range(n):
        pairs = set()
        for i in range(1, k + 1):
            for j in range(i, k + 1):
                if rng.chance(num, den):
                    pairs.add((i, j))
                    pairs.add((j, i))
        eta[a] = pairs
    attach, color = {}, {}
    for v in range(n, n + cfg.vertices):
        attach[v] = rng.below(n)
        color[v] = rng.randint(1, k)
    return NlcTree(k, parent, rho, attach, color, eta)


def gen_random(cfg: GenConfig) -> NlcTree:
    """A random k-NLC-tree; node ids ``0..n-1``, vertex ids follow.

    Parents: the previous node with probability 1/2, otherwise a uniform
    earlier node, which mixes long paths with bushy parts.
    """
    rng = Rng(cfg.seed)
    if cfg.reject_ladder_above is None:
        return _draw(cfg, rng)
    from .verify import ladder_index

    for _ in range(cfg.max_attempts):
        t = _draw(cfg, rng)
        if ladder_index(generate_graph(t), cap=cfg.reject_ladder_above + 1) <= cfg.reject_ladder_above:
            return t
    raise GenerationError(
        f"no instance with ladder index <= {cfg.reject_ladder_above} "
        f"after {cfg.max_attempts} attempts (seed {cfg.seed})"
    )


def _halfgraph_label(k: int) -> SkFun:
    # color 1 (fresh a_i) dies into 3, b-vertices keep color 2
    return SkFun(k, (3, 2, 3) + tuple(range(4, k + 1)))


def _halfgraph_ids(n: int, first_vertex: int) -> tuple[list[int], list[int]]:
    a = [first_vertex + 2 * i for i in range(n)]
    b = [first_vertex + 2 * i + 1 for i in range(n)]
    return a, b


def half_graph(n: int, offset: int = 0) -> tuple[Graph, list[int], list[int]]:
    """The half-graph of order ``n`` with ``a_i b_j`` an edge iff ``i <= j``."""
    a, b = _halfgraph_ids(n, offset)
    edges = [(a[i], b[j]) for i in range(n) for j in range(i, n)]
    return Graph(a + b, edges), a, b


def gen_halfgraph(n: int, k_min: int = 2) -> NlcTree:
    """A path of ``n`` nodes generating the order-``n`` half-graph.

    ``a_i`` (color 1) and ``b_i`` (color 2) hang at node ``i - 1``.  The
    construction needs a third color, so ``k = max(3, k_min)``.
    """
    if n < 1:
        raise InputError("n must be positive")
    k = max(3, k_min)
    f = _halfgraph_label(k)
    parent = {i: (i - 1 if i else None) for i in range(n)}
    rho = {i: f for i in range(1, n)}
    a, b = _halfgraph_ids(n, n)
    attach = {**{a[i]: i for i in range(n)}, **{b[i]: i for i in range(n)}}
    color = {**{v: 1 for v in a}, **{v: 2 for v in b}}
    eta = {i: {(1, 2), (2, 1)} for i in range(n)}
    return NlcTree(k, parent, rho, attach, color, eta)


def gen_unstable_chain(n: int, tail: int = 2) -> NlcTree:
    """The order-``n`` half-graph with ``a_i`` and ``b_i`` on separate nodes.

    The path reads ``A_1, B_1, ..., A_n, B_n`` from the root followed by
    ``tail`` empty nodes; every edge carries the same idempotent label, so
    the whole tree is one splendid factor with long type alternations.
    """
    if n < 1:
        raise InputError("n must be positive")
    k = 3
    f = _halfgraph_label(k)
    m = 2 * n + tail
    parent = {i: (i - 1 if i else None) for i in range(m)}
    rho = {i: f for i in range(1, m)}
    a, b = _halfgraph_ids(n, m)
    attach = {**{a[i]: 2 * i for i in range(n)}, **{b[i]: 2 * i + 1 for i in range(n)}}
    color = {**{v: 1 for v in a}, **{v: 2 for v in b}}
    eta = {i: {(1, 2), (2, 1)} for i in range(m)}
    return NlcTree(k, parent, rho, attach, color, eta)


# ------------------------------------------------------------ brute force


def _eta_for(requirements) -> set | None:
    """Symmetric η realizing every ``(i, j, edge?)`` requirement, if possible."""
    decided: dict[tuple[int, int], bool] = {}
    for i, j, want in requirements:
        key = (min(i, j), max(i, j))
        if decided.setdefault(key, want) != want:
            return None
    eta = set()
    for (i, j), want in decided.items():
        if want:
            eta.add((i, j))
            eta.add((j, i))
    return eta


def brute_force_nlc(g: Graph, k: int, budget: int = 2_000_000) -> NlcTree | None:
    """Search for a k-NLC-tree generating ``g`` (|V| <= 8, k <= 3).

    Tries a single node first, then binary join trees built by dynamic
    programming over vertex subsets, where each subset keeps its reachable
    top colorings up to renaming.  ``None`` means no tree of these shapes
    exists within the work budget.
    """
    verts = sorted(g.vertices)
    n = len(verts)
    if n > 8 or k > 3 or k < 1:
        raise RefusalError("brute_force_nlc supports at most 8 vertices and k <= 3")
    if n == 0:
        return NlcTree(k, {0: None}, {}, {}, {}, {})
    base = max(verts) + 1

    for cols in product(range(1, k + 1), repeat=n):
        eta = _eta_for(
            (cols[i], cols[j], g.has_edge(verts[i], verts[j]))
            for i, j in combinations(range(n), 2)
        )
        if eta is not None:
            return NlcTree(k, {base: None}, {}, dict.fromkeys(verts, base),
                           dict(zip(verts, cols)), {base: eta})

    idx = {v: i for i, v in enumerate(verts)}
    funcs = all_functions(k)
    # states[mask][canonical top coloring] = recipe producing it up to renaming
    states: dict[int, dict[tuple[int, ...], tuple]] = {}
    for v in verts:
        states[1 << idx[v]] = {(1,): ("leaf", v)}
    work = 0
    full = (1 << n) - 1
    for size in range(2, n + 1):
        for members in combinations(range(n), size):
            mask = sum(1 << i for i in members)
            found: dict[tuple[int, ...], tuple] = {}
            low, rest = members[0], members[1:]
            for r in range(len(rest)):
                for extra in combinations(rest, r):
                    m1 = (1 << low) | sum(1 << i for i in extra)
                    m2 = mask ^ m1
                    if m1 not in states or m2 not in states:
                        continue
                    l1 = [i for i in members if m1 >> i & 1]
                    l2 = [i for i in members if m2 >> i & 1]
                    for c1 in states[m1]:
                        for c2 in states[m2]:
                            for f1 in funcs:
                                d1 = [f1(c) for c in c1]
                                for f2 in funcs:
                                    work += 1
                                    if work > budget:
                                        return None
                                    d2 = [f2(c) for c in c2]
                                    eta = _eta_for(
                                        (ci, cj, g.has_edge(verts[i], verts[j]))
                                        for i, ci in zip(l1, d1)
                                        for j, cj in zip(l2, d2)
                                    )
                                    if eta is None:
                                        continue
                                    merged = dict(zip(l1, d1))
                                    merged.update(zip(l2, d2))
                                    colors = tuple(merged[i] for i in members)
                                    canon, sigma = _canon(colors)
                                    if canon not in found:
                                        found[canon] = ("join", m1, c1, f1, m2, c2, f2, eta, sigma)
            if found:
                states[mask] = found
    if full not in states:
        return None
    return _build(states, full, next(iter(states[full])), k, base)


def _canon(colors: tuple[int, ...]) -> tuple[tuple[int, ...], dict[int, int]]:
    """Rename colors by first occurrence; also return the renaming."""
    seen: dict[int, int] = {}
    out = tuple(seen.setdefault(c, len(seen) + 1) for c in colors)
    return out, seen


def _build(states, mask, canon, k, base) -> NlcTree:
    parent, rho, attach, color, eta = {}, {}, {}, {}, {}
    counter = [base]

    def build(mask, canon, par):
        """Emit the subtree; return (node, renaming from its actual colors to ``canon``)."""
        node = counter[0]
        counter[0] += 1
        parent[node] = par
        rec = states[mask][canon]
        if rec[0] == "leaf":
            attach[rec[1]] = node
            color[rec[1]] = 1
            eta[node] = set()
            return node, {1: 1}
        _, m1, c1, f1, m2, c2, f2, e, sigma = rec
        eta[node] = e
        for m, c, f in ((m1, c1, f1), (m2, c2, f2)):
            child, ren = build(m, c, node)
            # actual child color x is read as canonical ren[x], then mapped by f
            rho[child] = SkFun(k, tuple(f(ren.get(x, 1)) for x in range(1, k + 1)))
        return node, sigma

    build(mask, canon, None)
    return NlcTree(k, parent, rho, attach, color, eta)
