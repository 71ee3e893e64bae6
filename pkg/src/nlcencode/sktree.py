"""Rooted trees, k-NLC-trees, the graphs they generate, factors and quotients.

Node and vertex ids are integers drawn from disjoint ranges. Induced factors
keep the ids of the original tree, so factors of one tree can be compared and
superposed directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InputError, ParseError
from .semigroup import SkFun, compose, rho_of_path

__all__ = [
    "RootedTree",
    "NlcTree",
    "Graph",
    "Factorization",
    "QuotientTree",
    "lca",
    "path_edges",
    "kappa",
    "generate_graph",
    "induced_factor",
    "quotient",
    "parse_nlc",
    "format_nlc",
    "parse_graph",
    "format_graph",
]


class RootedTree:
    """A rooted tree given by its parent map (``None`` marks the root)."""

    def __init__(self, parent: Mapping[int, int | None]):
        self.parent: dict[int, int | None] = dict(parent)
        roots = [a for a, p in self.parent.items() if p is None]
        if len(roots) != 1:
            raise InputError(f"expected exactly one root, found {len(roots)}")
        self.root = roots[0]
        children: dict[int, list[int]] = {a: [] for a in self.parent}
        for a, p in self.parent.items():
            if p is None:
                continue
            if p not in self.parent:
                raise InputError(f"node {a} has unknown parent {p}")
            children[p].append(a)
        self.children = {a: tuple(sorted(cs)) for a, cs in children.items()}

        self.depth: dict[int, int] = {self.root: 0}
        self.preorder: list[int] = []
        stack = [self.root]
        while stack:
            a = stack.pop()
            self.preorder.append(a)
            for c in reversed(self.children[a]):
                self.depth[c] = self.depth[a] + 1
                stack.append(c)
        if len(self.preorder) != len(self.parent):
            raise InputError("parent links contain a cycle or unreachable nodes")

    def __contains__(self, a) -> bool:
        return a in self.parent

    def __len__(self) -> int:
        return len(self.parent)

    def __eq__(self, other) -> bool:
        return isinstance(other, RootedTree) and self.parent == other.parent

    def __hash__(self):
        return hash(frozenset(self.parent.items()))

    @property
    def nodes(self) -> list[int]:
        return sorted(self.parent)

    def _check(self, *nodes):
        for a in nodes:
            if a not in self.parent:
                raise InputError(f"unknown node {a}")

    def is_ancestor(self, a: int, b: int) -> bool:
        """``a ≼ b``: ``a`` lies on the path from ``b`` to the root."""
        da, db = self.depth[a], self.depth[b]
        if da > db:
            return False
        while db > da:
            b = self.parent[b]
            db -= 1
        return a == b

    def ancestors(self, a: int) -> list[int]:
        """``a`` and its ancestors, bottom-up."""
        out = [a]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out

    def lca(self, a: int, b: int) -> int:
        self._check(a, b)
        while self.depth[a] > self.depth[b]:
            a = self.parent[a]
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
        while a != b:
            a, b = self.parent[a], self.parent[b]
        return a

    def path_edges(self, y: int, x: int) -> list[int]:
        """Edges from ``y`` up to its ancestor ``x``, each named by its lower end."""
        self._check(y, x)
        if not self.is_ancestor(x, y):
            raise InputError(f"{x} is not an ancestor of {y}")
        out = []
        while y != x:
            out.append(y)
            y = self.parent[y]
        return out

    def subtree(self, a: int) -> list[int]:
        out, stack = [], [a]
        while stack:
            b = stack.pop()
            out.append(b)
            stack.extend(self.children[b])
        return out

    def height(self) -> int:
        return max(self.depth.values())


class NlcTree:
    """The tuple (T, U, ρ, π, η, χ) of a k-NLC-tree.

    ``rho`` labels each non-root node's parent edge, ``attach`` is π,
    ``color`` is χ and ``eta`` maps each node to a symmetric set of color
    pairs.
    """

    def __init__(
        self,
        k: int,
        parent: Mapping[int, int | None],
        rho: Mapping[int, SkFun],
        attach: Mapping[int, int],
        color: Mapping[int, int],
        eta: Mapping[int, Iterable[tuple[int, int]]] | None = None,
    ):
        if k < 1:
            raise InputError("k must be positive")
        self.k = k
        self.tree = RootedTree(parent)
        self.rho: dict[int, SkFun] = dict(rho)
        self.attach: dict[int, int] = dict(attach)
        self.color: dict[int, int] = dict(color)
        eta = eta or {}
        self.eta: dict[int, frozenset[tuple[int, int]]] = {
            a: frozenset(tuple(p) for p in eta.get(a, ())) for a in self.tree.parent
        }
        self._validate()

    def _validate(self):
        tree = self.tree
        for a, p in tree.parent.items():
            if p is None:
                if a in self.rho:
                    raise InputError("the root edge cannot carry a label")
                continue
            f = self.rho.get(a)
            if f is None:
                raise InputError(f"edge above node {a} has no label")
            if f.k != self.k:
                raise InputError(f"edge above node {a} has arity {f.k}, expected {self.k}")
        extra = set(self.rho) - set(tree.parent)
        if extra:
            raise InputError(f"labels on unknown nodes {sorted(extra)}")
        if set(self.attach) != set(self.color):
            raise InputError("attach and color must have the same domain")
        overlap = set(self.attach) & set(tree.parent)
        if overlap:
            raise InputError(f"ids {sorted(overlap)} used both as nodes and vertices")
        for v, a in self.attach.items():
            if a not in tree.parent:
                raise InputError(f"vertex {v} attached to unknown node {a}")
            c = self.color[v]
            if not 1 <= c <= self.k:
                raise InputError(f"vertex {v} has color {c} outside [1..{self.k}]")
        for a, pairs in self.eta.items():
            for i, j in pairs:
                if not (1 <= i <= self.k and 1 <= j <= self.k):
                    raise InputError(f"eta({a}) contains out-of-range pair {(i, j)}")
                if (j, i) not in pairs:
                    raise InputError(f"eta({a}) is not symmetric: {(i, j)}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NlcTree)
            and self.k == other.k
            and self.tree == other.tree
            and self.rho == other.rho
            and self.attach == other.attach
            and self.color == other.color
            and self.eta == other.eta
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"NlcTree(k={self.k}, nodes={len(self.tree)}, vertices={len(self.attach)})"

    @property
    def nodes(self) -> list[int]:
        return self.tree.nodes

    @property
    def vertices(self) -> list[int]:
        return sorted(self.attach)

    @property
    def root(self) -> int:
        return self.tree.root

    def path_rho(self, y: int, x: int) -> SkFun:
        """ρ(path_T(y, x)) for ``x ≼ y``."""
        return rho_of_path([self.rho[e] for e in self.tree.path_edges(y, x)], self.k)

    def colors_up(self, v: int) -> dict[int, int]:
        """κ(v, x) for every ancestor ``x`` of π(v)."""
        a, c = self.attach[v], self.color[v]
        out = {a: c}
        parent = self.tree.parent
        while parent[a] is not None:
            c = self.rho[a](c)
            a = parent[a]
            out[a] = c
        return out


@dataclass(frozen=True)
class Graph:
    """A simple undirected graph on integer vertex ids."""

    vertices: frozenset[int]
    edges: frozenset[tuple[int, int]]

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        vs = frozenset(vertices)
        es = set()
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop at {u}")
            if u not in vs or v not in vs:
                raise InputError(f"edge {(u, v)} uses an unknown vertex")
            es.add((u, v) if u < v else (v, u))
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", frozenset(es))

    @cached_property
    def adj(self) -> dict[int, frozenset[int]]:
        nbrs: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return {v: frozenset(s) for v, s in nbrs.items()}

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self.edges

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def induced(self, keep: Iterable[int]) -> "Graph":
        keep = frozenset(keep)
        return Graph(keep, [(u, v) for u, v in self.edges if u in keep and v in keep])


def lca(t: RootedTree | NlcTree, a: int, b: int) -> int:
    tree = t.tree if isinstance(t, NlcTree) else t
    return tree.lca(a, b)


def path_edges(t: RootedTree | NlcTree, y: int, x: int) -> list[int]:
    tree = t.tree if isinstance(t, NlcTree) else t
    return tree.path_edges(y, x)


def kappa(t: NlcTree, v: int, x: int) -> int:
    """The color of vertex ``v`` seen at the ancestor ``x`` of π(v)."""
    if v not in t.attach:
        raise InputError(f"unknown vertex {v}")
    a = t.attach[v]
    if x not in t.tree or not t.tree.is_ancestor(x, a):
        raise InputError(f"node {x} is not an ancestor of π({v}) = {a}")
    return t.path_rho(a, x)(t.color[v])


def generate_graph(t: NlcTree) -> Graph:
    """The graph on U where ``uv`` is an edge iff the pair of colors at π(u)∧π(v) is in η."""
    verts = t.vertices
    ups = {v: t.colors_up(v) for v in verts}
    edges = []
    tree = t.tree
    for i, u in enumerate(verts):
        au, cu = t.attach[u], ups[u]
        for v in verts[i + 1:]:
            x = tree.lca(au, t.attach[v])
            if (cu[x], ups[v][x]) in t.eta[x]:
                edges.append((u, v))
    return Graph(verts, edges)


def _part_top(tree: RootedTree, part: frozenset[int]) -> int:
    if not part:
        raise InputError("empty part")
    missing = [a for a in part if a not in tree]
    if missing:
        raise InputError(f"part contains unknown nodes {sorted(missing)}")
    tops = [a for a in part if tree.parent[a] not in part]
    if len(tops) != 1:
        raise InputError(f"part {sorted(part)} is not a connected subtree")
    return tops[0]


def induced_factor(t: NlcTree, part: Iterable[int]) -> NlcTree:
    """The k-NLC-tree 𝔗_F induced by the connected subtree ``part``."""
    part = frozenset(part)
    tree = t.tree
    top = _part_top(tree, part)
    parent = {a: (tree.parent[a] if a != top else None) for a in part}
    rho = {a: t.rho[a] for a in part if a != top}
    attach, color = {}, {}
    for v, a in t.attach.items():
        if not tree.is_ancestor(top, a):
            continue
        b, c = a, t.color[v]
        while b not in part:
            c = t.rho[b](c)
            b = tree.parent[b]
        attach[v] = b
        color[v] = c
    eta = {a: t.eta[a] for a in part}
    return NlcTree(t.k, parent, rho, attach, color, eta)


@dataclass(frozen=True)
class Factorization:
    """A partition of V(T) into connected subtrees, ordered by top node id."""

    parts: tuple[frozenset[int], ...]
    tops: tuple[int, ...]

    @classmethod
    def of(cls, t: NlcTree | RootedTree, parts: Iterable[Iterable[int]]) -> "Factorization":
        tree = t.tree if isinstance(t, NlcTree) else t
        fs = [frozenset(p) for p in parts]
        seen: set[int] = set()
        for p in fs:
            if seen & p:
                raise InputError("parts overlap")
            seen |= p
        if seen != set(tree.parent):
            raise InputError("parts do not cover the tree")
        tagged = sorted((_part_top(tree, p), p) for p in fs)
        return cls(tuple(p for _, p in tagged), tuple(top for top, _ in tagged))

    @classmethod
    def singletons(cls, t: NlcTree | RootedTree) -> "Factorization":
        tree = t.tree if isinstance(t, NlcTree) else t
        return cls.of(tree, [[a] for a in tree.parent])

    @classmethod
    def whole(cls, t: NlcTree | RootedTree) -> "Factorization":
        tree = t.tree if isinstance(t, NlcTree) else t
        return cls.of(tree, [tree.parent])

    @cached_property
    def top_of(self) -> dict[int, int]:
        """Node -> top of the part containing it."""
        return {a: top for top, p in zip(self.tops, self.parts) for a in p}

    def part(self, top: int) -> frozenset[int]:
        return self.parts[self.tops.index(top)]

    def __len__(self) -> int:
        return len(self.parts)


@dataclass
class QuotientTree:
    """The quotient S_k-tree (Y, U, ϱ, ϖ); Y-nodes are named by their tops."""

    k: int
    tree: RootedTree
    varrho: dict[int, SkFun]
    varpi: dict[int, int]
    parts: dict[int, frozenset[int]]

    @property
    def labels(self) -> set[SkFun]:
        return set(self.varrho.values())

    def path_varrho(self, x: int, y: int) -> SkFun:
        return rho_of_path([self.varrho[e] for e in self.tree.path_edges(x, y)], self.k)


def quotient(t: NlcTree, p: Factorization) -> QuotientTree:
    """Build 𝔗/𝒫, with F ≼_Y F' iff ⊤(F) ≼_T ⊤(F')."""
    tree = t.tree
    top_of = p.top_of
    if set(top_of) != set(tree.parent):
        raise InputError("factorization does not match the tree")
    yparent: dict[int, int | None] = {}
    varrho: dict[int, SkFun] = {}
    for top in p.tops:
        above = tree.parent[top]
        if above is None:
            yparent[top] = None
            continue
        ptop = top_of[above]
        yparent[top] = ptop
        varrho[top] = t.path_rho(top, ptop)
    varpi = {v: top_of[a] for v, a in t.attach.items()}
    parts = dict(zip(p.tops, p.parts))
    return QuotientTree(t.k, RootedTree(yparent), varrho, varpi, parts)


# ---------------------------------------------------------------- file formats


def _fmt_eta(pairs) -> str:
    if not pairs:
        return "-"
    return ";".join(f"({i},{j})" for i, j in sorted(pairs))


def _parse_eta(text: str, line_no: int) -> list[tuple[int, int]]:
    if text == "-":
        return []
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise ParseError(f"malformed eta pair {chunk!r}", line_no)
        try:
            i, j = (int(x) for x in chunk[1:-1].split(","))
        except ValueError:
            raise ParseError(f"malformed eta pair {chunk!r}", line_no) from None
        out.append((i, j))
    return out


def format_nlc(t: NlcTree) -> str:
    lines = [f"nlc k={t.k}"]
    tree = t.tree
    for a in tree.preorder:
        p = tree.parent[a]
        lines.append(f"node {a} parent={'-' if p is None else p} eta={_fmt_eta(t.eta[a])}")
    for a in sorted(t.rho):
        lines.append(f"edge {a} rho={t.rho[a]}")
    for v in t.vertices:
        lines.append(f"vertex {v} node={t.attach[v]} color={t.color[v]}")
    return "\n".join(lines) + "\n"


def _fields(tokens: Sequence[str], line_no: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, got {tok!r}", line_no)
        out[key] = value
    return out


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def parse_nlc(text: str) -> NlcTree:
    k = None
    parent: dict[int, int | None] = {}
    eta: dict[int, list] = {}
    rho: dict[int, SkFun] = {}
    attach: dict[int, int] = {}
    color: dict[int, int] = {}
    try:
        for no, toks in _lines(text):
            kind = toks[0]
            if kind == "nlc":
                if k is not None:
                    raise ParseError("duplicate header", no)
                k = int(_fields(toks[1:], no)["k"])
                continue
            if k is None:
                raise ParseError("missing 'nlc k=<k>' header", no)
            if kind == "node":
                a = int(toks[1])
                f = _fields(toks[2:], no)
                if a in parent:
                    raise ParseError(f"duplicate node {a}", no)
                p = f.get("parent", "-")
                if p != "-" and int(p) not in parent:
                    raise ParseError(f"node {a} appears before its parent {p}", no)
                parent[a] = None if p == "-" else int(p)
                eta[a] = _parse_eta(f.get("eta", "-"), no)
            elif kind == "edge":
                a = int(toks[1])
                rho[a] = SkFun.parse(_fields(toks[2:], no)["rho"])
            elif kind == "vertex":
                v = int(toks[1])
                f = _fields(toks[2:], no)
                if v in attach:
                    raise ParseError(f"duplicate vertex {v}", no)
                attach[v] = int(f["node"])
                color[v] = int(f["color"])
            else:
                raise ParseError(f"unknown record {kind!r}", no)
    except (KeyError, IndexError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed NLC-tree file: {exc}") from None
    if k is None:
        raise ParseError("empty NLC-tree file")
    return NlcTree(k, parent, rho, attach, color, eta)


def format_graph(g: Graph) -> str:
    lines = [f"graph n={g.n} m={g.m}"]
    lines += [f"v {v}" for v in sorted(g.vertices)]
    lines += [f"e {u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    header = None
    verts: list[int] = []
    edges: list[tuple[int, int]] = []
    for no, toks in _lines(text):
        try:
            if toks[0] == "graph":
                header = _fields(toks[1:], no)
            elif toks[0] == "v":
                verts.append(int(toks[1]))
            elif toks[0] == "e":
                edges.append((int(toks[1]), int(toks[2])))
            else:
                raise ParseError(f"unknown record {toks[0]!r}", no)
        except (IndexError, ValueError):
            raise ParseError("malformed graph record", no) from None
    if header is None:
        raise ParseError("missing 'graph' header")
    if not verts:
        verts = sorted({x for e in edges for x in e})
    g = Graph(verts, edges)
    if int(header.get("n", g.n)) != g.n or int(header.get("m", g.m)) != g.m:
        raise ParseError("header counts disagree with the records")
    return g


def compose_chain(fs: Sequence[SkFun]) -> SkFun:
    """Left-to-right composition ``fs[0] ∘ fs[1] ∘ …``."""
    out = fs[0]
    for f in fs[1:]:
        out = compose(out, f)
    return out
