"""Splendid-case analysis (classes, types, blocks, landmarks) and the encodings.

Parts of a quotient tree are named by their top node, so ``x``, ``y`` and
``z`` below are node ids of the factor tree that happen to be part tops.
Class indices are 0-based positions in the :class:`RamseyPartition`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .errors import InputError, InvariantViolation, ParseError
from .factorize import LEAF, SHALLOW, SPLENDID, RecursiveFactorization, is_shallow, is_splendid
from .semigroup import RamseyPartition, SkFun, ramsey_partition
from .sktree import (
    Factorization,
    NlcTree,
    QuotientTree,
    _fmt_eta,
    _parse_eta,
    induced_factor,
    quotient,
)

__all__ = [
    "VOID",
    "PLUS",
    "MINUS",
    "PM",
    "PairType",
    "BlockRecord",
    "LhatEntry",
    "SplendidAnalysis",
    "SplendidEncoding",
    "ShallowEncoding",
    "EncodedStructure",
    "gamma_of_vertex",
    "gamma_adjacent",
    "compute_type",
    "compute_blocks",
    "blocks_from_types",
    "compute_landmarks",
    "compute_g_functions",
    "encode_splendid",
    "encode_shallow",
    "encode_recursive",
    "serialize_structure",
    "parse_structure",
]

VOID, PLUS, MINUS, PM = "○", "+", "-", "±"


@dataclass(frozen=True)
class PairType:
    s0: str
    s1: str

    def __str__(self) -> str:
        return self.s0 + self.s1

    @property
    def symbols(self) -> tuple[str, str]:
        return (self.s0, self.s1)


def _symbol(seen: set[bool]) -> str:
    if not seen:
        return VOID
    if seen == {True}:
        return PLUS
    if seen == {False}:
        return MINUS
    return PM


_POSITIVE = {(VOID, VOID), (PLUS, VOID), (VOID, PLUS), (PLUS, PLUS)}
_NEGATIVE = {(VOID, VOID), (MINUS, VOID), (VOID, MINUS), (MINUS, MINUS)}
_FIRST = {(VOID, VOID), (MINUS, VOID), (PLUS, VOID), (PM, VOID)}
_SECOND = {(VOID, VOID), (VOID, MINUS), (VOID, PLUS), (VOID, PM)}


def _fully_mixed(tp: PairType) -> bool:
    s = tp.symbols
    return VOID not in s and (PM in s or (PLUS in s and MINUS in s))


@dataclass(frozen=True)
class BlockRecord:
    members: tuple[int, ...]
    fully_mixed: bool
    positive: bool
    negative: bool
    first_biased: bool
    second_biased: bool
    minus_marker: int | None
    plus_marker: int | None

    @property
    def top(self) -> int:
        return self.members[0]

    @property
    def biased(self) -> bool:
        return self.first_biased or self.second_biased

    @property
    def mixed_first_biased(self) -> bool:
        return self.first_biased and not self.positive and not self.negative

    @property
    def mixed_second_biased(self) -> bool:
        return self.second_biased and not self.positive and not self.negative

    @property
    def flags(self) -> str:
        """Compact kind letters: P N F S X (fully mixed)."""
        out = ""
        for flag, letter in (
            (self.positive, "P"),
            (self.negative, "N"),
            (self.first_biased, "F"),
            (self.second_biased, "S"),
            (self.fully_mixed, "X"),
        ):
            if flag:
                out += letter
        return out


def blocks_from_types(seq: Sequence[tuple[int, PairType]]) -> list[BlockRecord]:
    """Greedy split of a root-first type sequence into longest valid intervals."""
    out = []
    n = len(seq)
    i = 0
    while i < n:
        best = 1
        for kind in (_POSITIVE, _NEGATIVE, _FIRST, _SECOND):
            j = i
            while j < n and seq[j][1].symbols in kind:
                j += 1
            best = max(best, j - i)
        members = seq[i:i + best]
        syms = [tp.symbols for _, tp in members]
        minus = next((y for y, tp in members if MINUS in tp.symbols or PM in tp.symbols), None)
        plus = next((y for y, tp in members if PLUS in tp.symbols or PM in tp.symbols), None)
        out.append(
            BlockRecord(
                members=tuple(y for y, _ in members),
                fully_mixed=best == 1 and _fully_mixed(members[0][1]),
                positive=all(s in _POSITIVE for s in syms),
                negative=all(s in _NEGATIVE for s in syms),
                first_biased=all(s in _FIRST for s in syms),
                second_biased=all(s in _SECOND for s in syms),
                minus_marker=minus,
                plus_marker=plus,
            )
        )
        i += best
    return out


@dataclass(frozen=True)
class LhatEntry:
    """One element ``y`` of L̂(x) with its block data and ϱ(path_Y(x, y))."""

    node: int
    flags: str
    varrho: SkFun

    @property
    def block_start(self) -> bool:
        return "T" in self.flags

    def tag(self) -> str:
        return f"{self.flags or '_'};{self.varrho}"

    @classmethod
    def from_tag(cls, node: int, text: str) -> "LhatEntry":
        flags, _, fun = text.partition(";")
        return cls(node, "" if flags == "_" else flags, SkFun.parse(fun))


class SplendidAnalysis:
    """Everything derived from a factor tree and its splendid quotient."""

    def __init__(self, t: NlcTree, q: QuotientTree, gamma: RamseyPartition | None = None):
        self.t = t
        self.q = q
        self.k = t.k
        if gamma is None:
            gamma = ramsey_partition(q.labels, t.k)
        self.gamma = gamma
        self.ntypes = len(gamma)
        ytree = q.tree
        self.ytree = ytree
        self.yparent = ytree.parent
        self.ydepth = ytree.depth
        self.vertex_part = dict(q.varpi)
        self.colors_up = {v: t.colors_up(v) for v in t.attach}
        self.vclass = {
            v: gamma.index(self.colors_up[v][self.vertex_part[v]]) for v in t.attach
        }
        self.by_part: dict[int, list[int]] = {y: [] for y in ytree.parent}
        for v in sorted(t.attach):
            self.by_part[self.vertex_part[v]].append(v)
        self._edge_types: dict[int, dict] = {}

    # ----------------------------------------------------------- basics

    def gamma_of_vertex(self, v: int) -> int:
        return self.vclass[v]

    def ancestors(self, x: int) -> list[int]:
        """Ancestors of ``x`` in Y including ``x``, root first."""
        return list(reversed(self.ytree.ancestors(x)))

    def P(self, x: int) -> list[int]:
        """P(x): proper ancestors above the parent, root first."""
        return [y for y in self.ancestors(x) if self.ydepth[y] <= self.ydepth[x] - 2]

    def _below(self, y: int) -> list[int]:
        return self.ytree.subtree(y)

    def _meeting(self, x: int, y: int) -> list[int]:
        """Vertices ``v`` with ``x ∧_Y ϖ(v) = y``."""
        return [v for v in self.t.attach if self.ytree.lca(x, self.vertex_part[v]) == y]

    def gamma_adjacent(self, x: int, g: int, y: int, v: int, m: int | None = None) -> bool:
        if y not in self.P(x) or self.ytree.lca(x, self.vertex_part[v]) != y:
            raise InputError(f"need y in P(x) and x ∧ ϖ(v) = y (x={x}, y={y}, v={v})")
        tree = self.t.tree
        a = tree.lca(x, self.t.attach[v])
        kv = self.colors_up[v][a]
        lift = self.t.path_rho(x, a)
        ms = [m] if m is not None else list(self.gamma.classes[g])
        answers = {(kv, lift(mm)) in self.t.eta[a] for mm in ms}
        if len(answers) != 1:
            raise InvariantViolation(f"γ-adjacency depends on the class member (x={x}, y={y}, v={v})")
        return answers.pop()

    def compute_type(self, x: int, g0: int, g1: int, y: int) -> PairType:
        """Literal type: quantify over all vertices meeting ``x`` at ``y``."""
        if y not in self.P(x):
            raise InputError(f"{y} is not in P({x})")
        seen: tuple[set, set] = (set(), set())
        for v in self._meeting(x, y):
            c = self.vclass[v]
            if c == g1:
                seen[0].add(self.gamma_adjacent(x, g0, y, v))
            if c == g0:
                seen[1].add(self.gamma_adjacent(x, g1, y, v))
        return PairType(_symbol(seen[0]), _symbol(seen[1]))

    # ------------------------------------------------------ fast types

    def edge_types(self, w: int) -> dict[tuple[int, int], PairType]:
        """Types at the grandparent of ``w``, valid for every ``x`` below ``w``.

        Only the recoloring from ``⊤(w)`` up to the grandparent matters, and
        by forward Ramsey that recoloring is ``ϱ(e(w))`` followed by the
        T-path from ``⊤(y')`` upwards, where ``y'`` is the parent of ``w``.
        """
        cached = self._edge_types.get(w)
        if cached is not None:
            return cached
        t, tree = self.t, self.t.tree
        y1 = self.yparent[w]
        y = self.yparent[y1]
        below_y1 = set(self._below(y1))
        start = tree.parent[y1]
        chain = [start]
        while chain[-1] != y:
            chain.append(tree.parent[chain[-1]])
        # colors seen at each node of the chain for each class representative
        lifted = []
        for g in range(self.ntypes):
            m = self.gamma.classes[g][0]
            c = t.rho[y1](self.q.varrho[w](m))
            col = {start: c}
            for below, a in zip(chain, chain[1:]):
                c = t.rho[below](c)
                col[a] = c
            lifted.append(col)
        seen = [[set() for _ in range(self.ntypes)] for _ in range(self.ntypes)]
        for part in self._below(y):
            if part in below_y1:
                continue
            for v in self.by_part[part]:
                a = tree.lca(start, t.attach[v])
                kv = self.colors_up[v][a]
                cv = self.vclass[v]
                eta = t.eta[a]
                for g in range(self.ntypes):
                    seen[g][cv].add((kv, lifted[g][a]) in eta)
        out = {}
        for g0 in range(self.ntypes):
            for g1 in range(self.ntypes):
                out[(g0, g1)] = PairType(_symbol(seen[g0][g1]), _symbol(seen[g1][g0]))
        self._edge_types[w] = out
        return out

    def types(self, x: int, g0: int, g1: int) -> list[tuple[int, PairType]]:
        """Types(x) as ``(y, type)`` pairs, root first."""
        out = []
        for w in self.ancestors(x):
            if self.ydepth[w] >= 2:
                y = self.yparent[self.yparent[w]]
                out.append((y, self.edge_types(w)[(g0, g1)]))
        return out

    def blocks(self, x: int, g0: int, g1: int) -> list[BlockRecord]:
        return blocks_from_types(self.types(x, g0, g1))

    def landmarks(self, x: int, g0: int, g1: int):
        """``(Q, S, Ł, L̂)`` for ``x``, each sorted root first."""
        order = self.ydepth
        Q = {x}
        if self.yparent[x] is not None:
            Q.add(self.yparent[x])
        S = set()
        for b in self.blocks(x, g0, g1):
            S.add(b.top)
            for mk in (b.minus_marker, b.plus_marker):
                if mk is not None:
                    S.add(mk)
        L = Q | S
        anc = self.ancestors(x)
        pos = {y: i for i, y in enumerate(anc)}
        hat = set()
        for y in L:
            i = pos[y]
            for j in (i - 1, i, i + 1, i + 2):
                if 0 <= j < len(anc):
                    hat.add(anc[j])
        key = order.__getitem__
        return sorted(Q, key=key), sorted(S, key=key), sorted(L, key=key), sorted(hat, key=key)

    # ------------------------------------------------------ g, ĝ, h

    @cached_property
    def _has_class_below(self) -> list[dict[int, int]]:
        """Per class, the number of its vertices in each Y-subtree."""
        counts = [dict.fromkeys(self.ytree.parent, 0) for _ in range(self.ntypes)]
        for v, part in self.vertex_part.items():
            y = part
            c = self.vclass[v]
            while y is not None:
                counts[c][y] += 1
                y = self.yparent[y]
        return counts

    def g_functions(self):
        """Maps ``(g, ĝ, h)``, each a list over classes of ``{node: node}``; ⊥ is absence."""
        g_map, ghat_map, h_map = [], [], []
        ytree = self.ytree
        for c in range(self.ntypes):
            cnt = self._has_class_below[c]
            gm, ghm, hm = {}, {}, {}
            for x in ytree.parent:
                chain = ytree.ancestors(x)  # bottom-up
                for i, y in enumerate(chain):
                    if cnt[y]:
                        gm[x] = y
                        if i > 0:
                            ghm[x] = chain[i - 1]
                        break
            for y in ytree.parent:
                grand = [gc for ch in ytree.children[y] for gc in ytree.children[ch]]
                total = cnt[y]
                if total == 0:
                    if len(grand) == 1:
                        hm[y] = grand[0]
                    continue
                hits = [gc for gc in grand if cnt[gc] == total]
                if len(hits) == 1:
                    hm[y] = hits[0]
            g_map.append(gm)
            ghat_map.append(ghm)
            h_map.append(hm)
        return g_map, ghat_map, h_map


# ------------------------------------------------------ spec-shaped wrappers


def gamma_of_vertex(t: NlcTree, q: QuotientTree, gamma: RamseyPartition, v: int) -> int:
    return SplendidAnalysis(t, q, gamma).gamma_of_vertex(v)


def gamma_adjacent(t, q, gamma, x, g, y, v, m=None) -> bool:
    return SplendidAnalysis(t, q, gamma).gamma_adjacent(x, g, y, v, m)


def compute_type(t, q, gamma, x, g0, g1, y) -> PairType:
    return SplendidAnalysis(t, q, gamma).compute_type(x, g0, g1, y)


def compute_blocks(t, q, gamma, x, g0, g1) -> list[BlockRecord]:
    return SplendidAnalysis(t, q, gamma).blocks(x, g0, g1)


def compute_landmarks(t, q, gamma, x, g0, g1):
    return SplendidAnalysis(t, q, gamma).landmarks(x, g0, g1)


def compute_g_functions(t, q, gamma):
    return SplendidAnalysis(t, q, gamma).g_functions()


# ------------------------------------------------------------ encodings


@dataclass
class ShallowEncoding:
    k: int
    root: int
    parent_t: dict[int, int]
    rho_e: dict[int, SkFun]
    top: dict[int, int]
    rho_top: dict[int, SkFun]
    kind: str = SHALLOW


@dataclass
class SplendidEncoding:
    k: int
    root: int
    classes: RamseyPartition
    parent_t: dict[int, int]
    parent_y: dict[int, int]
    rho_e: dict[int, SkFun]
    varrho_e: dict[int, SkFun]
    top: dict[int, int]
    rho_top: dict[int, SkFun]
    g: list[dict[int, int]]
    ghat: list[dict[int, int]]
    h: list[dict[int, int]]
    rho_ghat: list[dict[int, SkFun]]
    lhat: dict[tuple[int, int], dict[int, list[LhatEntry]]]
    kind: str = SPLENDID
    # audit-only data, never serialized
    landmark_sizes: dict = field(default_factory=dict, repr=False, compare=False)


def _common_maps(t: NlcTree, p: Factorization):
    tree = t.tree
    top = dict(p.top_of)
    parent_t = {a: b for a, b in tree.parent.items() if b is not None}
    rho_e = dict(t.rho)
    rho_top = {a: t.path_rho(a, top[a]) for a in tree.parent}
    return parent_t, rho_e, top, rho_top


def encode_shallow(t: NlcTree, p: Factorization) -> ShallowEncoding:
    if not is_shallow(quotient(t, p)):
        raise InputError("quotient is not shallow")
    parent_t, rho_e, top, rho_top = _common_maps(t, p)
    return ShallowEncoding(t.k, t.root, parent_t, rho_e, top, rho_top)


def encode_splendid(t: NlcTree, p: Factorization) -> SplendidEncoding:
    q = quotient(t, p)
    if not is_splendid(q):
        raise InputError("quotient is not splendid")
    an = SplendidAnalysis(t, q)
    parent_t, rho_e, top, rho_top = _common_maps(t, p)
    yparent = {x: y for x, y in q.tree.parent.items() if y is not None}
    g_map, ghat_map, h_map = an.g_functions()
    rho_ghat = []
    for c in range(an.ntypes):
        rho_ghat.append({x: q.path_varrho(x, gh) for x, gh in ghat_map[c].items()})
    lhat: dict = {}
    sizes: dict = {}
    for g0 in range(an.ntypes):
        for g1 in range(an.ntypes):
            per_x = {}
            for x in q.tree.parent:
                blocks = an.blocks(x, g0, g1)
                marks = {}
                for b in blocks:
                    marks[b.top] = "T" + b.flags
                    for mk, letter in ((b.minus_marker, "m"), (b.plus_marker, "p")):
                        if mk is not None:
                            marks[mk] = marks.get(mk, "") + letter
                Q, S, L, hat = an.landmarks(x, g0, g1)
                for y in L:
                    marks[y] = marks.get(y, "") + "L"
                per_x[x] = [LhatEntry(y, marks.get(y, ""), q.path_varrho(x, y)) for y in hat]
                sizes[(g0, g1, x)] = (len(blocks), len(L), len(hat))
            lhat[(g0, g1)] = per_x
    return SplendidEncoding(
        k=t.k,
        root=t.root,
        classes=an.gamma,
        parent_t=parent_t,
        parent_y=yparent,
        rho_e=rho_e,
        varrho_e=dict(q.varrho),
        top=top,
        rho_top=rho_top,
        g=g_map,
        ghat=ghat_map,
        h=h_map,
        rho_ghat=rho_ghat,
        lhat=lhat,
        landmark_sizes=sizes,
    )


# ------------------------------------------------------- J* structure


@dataclass
class EncodedStructure:
    """J*: node functions and tags per level, level roots, η flags and U.

    ``funs[(level, name)]`` is a partial function on nodes; tag names carry
    their level as a ``<level>.`` prefix.
    """

    k: int
    levels: int
    funs: dict[tuple[int, str], dict[int, int]]
    tags: dict[int, dict[str, str]]
    eta1: dict[int, frozenset[tuple[int, int]]]
    pi: dict[int, int]
    chi: dict[int, int]
    rooti: dict[int, dict[int, int]]
    h_audit: int | None = None

    @property
    def nodes(self) -> list[int]:
        return sorted(self.eta1)

    @property
    def vertices(self) -> list[int]:
        return sorted(self.pi)

    def set_fun(self, level: int, name: str, a: int, b: int):
        self.funs.setdefault((level, name), {})[a] = b

    def set_tag(self, level: int, a: int, name: str, value: str):
        self.tags.setdefault(a, {})[f"{level}.{name}"] = value

    def tag(self, level: int, a: int, name: str) -> str | None:
        return self.tags.get(a, {}).get(f"{level}.{name}")


def _emit_common(j: EncodedStructure, level: int, enc):
    for a, b in enc.parent_t.items():
        j.set_fun(level, "parentT", a, b)
    for a, b in enc.top.items():
        j.set_fun(level, "top", a, b)
    for a, f in enc.rho_e.items():
        j.set_tag(level, a, "rho_e", str(f))
    for a, f in enc.rho_top.items():
        j.set_tag(level, a, "rho_top", str(f))
    j.set_tag(level, enc.root, "kind", enc.kind)


def _emit_splendid(j: EncodedStructure, level: int, enc: SplendidEncoding):
    _emit_common(j, level, enc)
    j.set_tag(level, enc.root, "classes", enc.classes.encode())
    for x, y in enc.parent_y.items():
        j.set_fun(level, "parentY", x, y)
    for x, f in enc.varrho_e.items():
        j.set_tag(level, x, "varrho_e", str(f))
    for c in range(len(enc.classes)):
        for x, y in enc.g[c].items():
            j.set_fun(level, f"g.{c}", x, y)
        for x, y in enc.ghat[c].items():
            j.set_fun(level, f"ghat.{c}", x, y)
        for x, y in enc.h[c].items():
            j.set_fun(level, f"h.{c}", x, y)
        for x, f in enc.rho_ghat[c].items():
            j.set_tag(level, x, f"rho_ghat.{c}", str(f))
    for (g0, g1), per_x in enc.lhat.items():
        for x, entries in per_x.items():
            for i, e in enumerate(entries):
                name = f"lhat.{g0}.{g1}.{i}"
                j.set_fun(level, name, x, e.node)
                j.set_tag(level, x, name, e.tag())


def encode_recursive(t: NlcTree, rf: RecursiveFactorization) -> EncodedStructure:
    """Superpose the per-factor encodings of every hierarchy level."""
    depth = rf.depth
    j = EncodedStructure(t.k, depth, {}, {}, {}, dict(t.attach), dict(t.color), {})
    for a in t.tree.parent:
        j.eta1[a] = frozenset(t.eta[a])
    for f in rf.factors:
        if f.kind == LEAF:
            continue
        sub = induced_factor(t, f.nodes)
        try:
            p = Factorization.of(sub.tree, [rf.factors[c].nodes for c in f.children])
            if f.kind == SPLENDID:
                _emit_splendid(j, f.level, encode_splendid(sub, p))
            else:
                _emit_common(j, f.level, encode_shallow(sub, p))
        except InputError as exc:
            raise InvariantViolation(f"factor {f.id} at level {f.level}: {exc}") from None
    for i, level in enumerate(rf.levels(), start=1):
        j.rooti[i] = dict(level.top_of)
    return j


# ----------------------------------------------------------- text format


def _tag_key(item):
    node, name, _ = item
    level, _, rest = name.partition(".")
    return (int(level), rest, node)


def serialize_structure(j: EncodedStructure) -> str:
    h = "-" if j.h_audit is None else j.h_audit
    lines = [f"jstar levels={j.levels} k={j.k} h_audit={h}"]
    for (level, name) in sorted(j.funs):
        fmap = j.funs[(level, name)]
        for a in sorted(fmap):
            lines.append(f"fun {level} {name} {a} {fmap[a]}")
    items = [(a, name, value) for a, tg in j.tags.items() for name, value in tg.items()]
    for a, name, value in sorted(items, key=_tag_key):
        lines.append(f"tag {a} {name}={value}")
    for a in sorted(j.eta1):
        lines.append(f"eta1 {a} {_fmt_eta(j.eta1[a])}")
    for v in sorted(j.pi):
        lines.append(f"vmap {v} pi={j.pi[v]} chi={j.chi[v]}")
    for level in sorted(j.rooti):
        rmap = j.rooti[level]
        for a in sorted(rmap):
            lines.append(f"rooti {level} {a} {rmap[a]}")
    return "\n".join(lines) + "\n"


def parse_structure(text: str) -> EncodedStructure:
    j = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            kind = toks[0]
            if kind == "jstar":
                f = dict(tok.split("=", 1) for tok in toks[1:])
                h = None if f["h_audit"] == "-" else int(f["h_audit"])
                j = EncodedStructure(int(f["k"]), int(f["levels"]), {}, {}, {}, {}, {}, {}, h)
                continue
            if j is None:
                raise ParseError("missing jstar header", no)
            if kind == "fun":
                j.set_fun(int(toks[1]), toks[2], int(toks[3]), int(toks[4]))
            elif kind == "tag":
                name, _, value = toks[2].partition("=")
                j.tags.setdefault(int(toks[1]), {})[name] = value
            elif kind == "eta1":
                j.eta1[int(toks[1])] = frozenset(_parse_eta(toks[2], no))
            elif kind == "vmap":
                f = dict(tok.split("=", 1) for tok in toks[2:])
                j.pi[int(toks[1])] = int(f["pi"])
                j.chi[int(toks[1])] = int(f["chi"])
            elif kind == "rooti":
                j.rooti.setdefault(int(toks[1]), {})[int(toks[2])] = int(toks[3])
            else:
                raise ParseError(f"unknown record {kind!r}", no)
        except (IndexError, KeyError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed record: {exc}", no) from None
    if j is None:
        raise ParseError("empty structure file")
    return j
