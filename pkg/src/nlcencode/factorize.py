"""Recursive factorizations whose quotients are splendid or shallow.

A single step proposes two families of candidate partitions and keeps the
one with the smallest largest part:

* kernel cuts: fix a kernel partition K of the colors and walk the tree top
  down, starting a new part at a node as soon as the recoloring from that
  node to the top of its current part is an idempotent with kernel K.  All
  quotient labels are then idempotents sharing K, hence forward Ramsey.
* size thresholds: the nodes whose subtree has more than τ nodes form the
  root part and every remaining maximal subtree becomes a part of its own,
  which yields a quotient of height at most one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import HierarchyError, InputError
from .semigroup import SkFun, compose, is_forward_ramsey, is_idempotent, set_partitions
from .sktree import Factorization, NlcTree, QuotientTree, induced_factor, quotient

__all__ = [
    "LEAF",
    "SPLENDID",
    "SHALLOW",
    "FactorRecord",
    "RecursiveFactorization",
    "HierarchyAudit",
    "is_splendid",
    "is_shallow",
    "factorize_step",
    "recursive_factorize",
    "verify_hierarchy",
    "format_hierarchy",
]

LEAF, SPLENDID, SHALLOW = "leaf", "splendid", "shallow"


def is_splendid(q: QuotientTree) -> bool:
    return is_forward_ramsey(q.labels)


def is_shallow(q: QuotientTree) -> bool:
    return q.tree.height() <= 1


def _kernel_cut(t: NlcTree, kernel) -> list[list[int]]:
    tree = t.tree
    ident = SkFun.identity(t.k)
    running = {tree.root: ident}
    top = {tree.root: tree.root}
    for a in tree.preorder:
        for c in tree.children[a]:
            cand = compose(running[a], t.rho[c])
            if is_idempotent(cand) and cand.kernel() == kernel:
                top[c], running[c] = c, ident
            else:
                top[c], running[c] = top[a], cand
    parts: dict[int, list[int]] = {}
    for a, r in top.items():
        parts.setdefault(r, []).append(a)
    return list(parts.values())


def _threshold_cut(t: NlcTree, tau: int, size: dict[int, int]) -> list[list[int]]:
    tree = t.tree
    root_part = [a for a in tree.preorder if size[a] > tau]
    parts = [root_part]
    kept = set(root_part)
    for a in root_part:
        for c in tree.children[a]:
            if c not in kept:
                parts.append(tree.subtree(c))
    return parts


def _kernels(k: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    for parts in set_partitions(list(range(1, k + 1))):
        yield tuple(sorted(tuple(p) for p in parts))


def factorize_step(t: NlcTree) -> tuple[Factorization, str]:
    """One factorization step; the quotient is splendid or shallow.

    Candidates are ranked by largest part, then shallow before splendid,
    then by threshold or kernel order.
    """
    tree = t.tree
    n = len(tree)
    if n < 2:
        raise InputError("a single-node tree has no proper factorization")
    size: dict[int, int] = {}
    for a in reversed(tree.preorder):
        size[a] = 1 + sum(size[c] for c in tree.children[a])

    best = None
    for tau in range(1, n):
        parts = _threshold_cut(t, tau, size)
        if len(parts) < 2:
            continue
        key = (max(map(len, parts)), 0, tau)
        if best is None or key < best[0]:
            best = (key, parts, SHALLOW)
    if t.k <= 6:
        for idx, kernel in enumerate(sorted(_kernels(t.k))):
            parts = _kernel_cut(t, kernel)
            if len(parts) < 2:
                continue
            key = (max(map(len, parts)), 1, idx)
            if key < best[0]:
                best = (key, parts, SPLENDID)
    _, parts, kind = best
    return Factorization.of(tree, parts), kind


@dataclass
class FactorRecord:
    """One factor of the hierarchy; ``level`` is the highest level it occupies."""

    id: int
    nodes: frozenset[int]
    top: int
    kind: str
    level: int
    parent: int | None
    children: tuple[int, ...] = ()
    quotient: QuotientTree | None = field(default=None, repr=False, compare=False)


@dataclass
class RecursiveFactorization:
    tree: NlcTree
    factors: list[FactorRecord]

    @property
    def depth(self) -> int:
        return max(f.level for f in self.factors)

    def factor(self, fid: int) -> FactorRecord:
        return self.factors[fid]

    def levels(self) -> list[Factorization]:
        """``[Q_1, ..., Q_ℓ]``."""
        out = []
        for i in range(1, self.depth + 1):
            parts = [
                f.nodes
                for f in self.factors
                if (f.kind == LEAF and f.level >= i) or (f.kind != LEAF and f.level == i)
            ]
            out.append(Factorization.of(self.tree, parts))
        return out

    def at_level(self, i: int) -> list[FactorRecord]:
        """Factors that carry an encoding at level ``i`` (non-leaf, created there)."""
        return [f for f in self.factors if f.kind != LEAF and f.level == i]

    def children_partition(self, f: FactorRecord) -> Factorization:
        tree = induced_factor(self.tree, f.nodes).tree
        return Factorization.of(tree, [self.factors[c].nodes for c in f.children])


def recursive_factorize(t: NlcTree) -> RecursiveFactorization:
    # first pass: build the factor tree breadth-first with relative depths
    pending = [(frozenset(t.tree.parent), None, 0, t)]
    raw = []
    while pending:
        nxt = []
        for nodes, parent, dep, sub in pending:
            fid = len(raw)
            if len(nodes) == 1:
                raw.append([fid, nodes, sub.root, LEAF, dep, parent, [], None])
            else:
                p, kind = factorize_step(sub)
                raw.append([fid, nodes, sub.root, kind, dep, parent, [], quotient(sub, p)])
                for part in p.parts:
                    nxt.append((part, fid, dep + 1, induced_factor(sub, part)))
            if parent is not None:
                raw[parent][6].append(fid)
        pending = nxt
    depth = 1 + max(r[4] for r in raw)
    factors = [
        FactorRecord(fid, nodes, top, kind, depth - dep, parent, tuple(children), q)
        for fid, nodes, top, kind, dep, parent, children, q in raw
    ]
    return RecursiveFactorization(t, factors)


@dataclass
class HierarchyAudit:
    depth: int
    depth_bound: int
    factors_per_level: dict[int, int]
    kinds: dict[str, int]

    @property
    def depth_ok(self) -> bool:
        return self.depth <= self.depth_bound


def verify_hierarchy(rf: RecursiveFactorization) -> HierarchyAudit:
    """Re-check the hierarchy contract from node sets alone.

    Raises :class:`HierarchyError` naming the first offending factor.
    """
    t = rf.tree
    all_nodes = frozenset(t.tree.parent)
    factors = rf.factors
    roots = [f for f in factors if f.parent is None]
    if len(roots) != 1 or roots[0].nodes != all_nodes:
        raise HierarchyError("top level must be the single factor {T}")
    depth = rf.depth
    if roots[0].level != depth:
        raise HierarchyError(f"root factor sits at level {roots[0].level}, not {depth}")

    for f in factors:
        label = f"factor {f.id} (top={f.top}, level={f.level})"
        try:
            sub = induced_factor(t, f.nodes)
        except InputError as exc:
            raise HierarchyError(f"{label}: not a connected subtree ({exc})") from None
        if sub.root != f.top:
            raise HierarchyError(f"{label}: recorded top differs from {sub.root}")
        if f.kind == LEAF:
            if f.children:
                raise HierarchyError(f"{label}: leaf factor has children")
            continue
        if f.kind not in (SPLENDID, SHALLOW):
            raise HierarchyError(f"{label}: unknown kind {f.kind!r}")
        kids = [factors[c] for c in f.children]
        for c in kids:
            if c.parent != f.id:
                raise HierarchyError(f"{label}: child {c.id} does not point back")
            if c.level != f.level - 1:
                raise HierarchyError(f"{label}: child {c.id} at level {c.level}, expected {f.level - 1}")
            if len(c.nodes) >= len(f.nodes):
                raise HierarchyError(f"{label}: child {c.id} is not strictly smaller")
        try:
            p = Factorization.of(sub.tree, [c.nodes for c in kids])
        except InputError as exc:
            raise HierarchyError(f"{label}: children do not partition the factor ({exc})") from None
        q = quotient(sub, p)
        ok = is_splendid(q) if f.kind == SPLENDID else is_shallow(q)
        if not ok:
            raise HierarchyError(f"{label}: quotient is not {f.kind}")

    levels = rf.levels()
    if any(len(part) != 1 for part in levels[0].parts):
        raise HierarchyError("Q_1 is not the all-singletons factorization")
    for i in range(len(levels) - 1):
        upper = levels[i + 1].top_of
        for part in levels[i].parts:
            if len({upper[a] for a in part}) != 1:
                raise HierarchyError(f"Q_{i + 1} does not refine Q_{i + 2}")

    kinds: dict[str, int] = {}
    for f in factors:
        kinds[f.kind] = kinds.get(f.kind, 0) + 1
    return HierarchyAudit(
        depth=depth,
        depth_bound=3 * t.k**t.k,
        factors_per_level={i + 1: len(q) for i, q in enumerate(levels)},
        kinds=kinds,
    )


def format_hierarchy(rf: RecursiveFactorization) -> str:
    lines = []
    for f in rf.factors:
        parent = "-" if f.parent is None else f.parent
        lines.append(
            f"factor {f.id} level={f.level} top={f.top} kind={f.kind} "
            f"parent={parent} nodes={len(f.nodes)}"
        )
    return "\n".join(lines) + "\n"
