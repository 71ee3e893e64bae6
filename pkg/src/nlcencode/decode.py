"""Adjacency decoding from J* alone.

Each step reads only the functions and tags of one factor at one level.
It either decides the query or hands a smaller query ``(d0, d1, t0, t1)``
to the child factor containing ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .encode import EncodedStructure, LhatEntry, ShallowEncoding, SplendidEncoding
from .errors import EncodingCorruption, InputError
from .factorize import SHALLOW, SPLENDID
from .semigroup import RamseyPartition, SkFun
from .sktree import Graph

__all__ = [
    "DecodeStep",
    "decode_splendid_step",
    "decode_shallow_step",
    "read_factor",
    "Decoder",
    "decode_adjacent",
    "decode_full",
]


@dataclass(frozen=True)
class DecodeStep:
    case: str
    adjacent: bool | None = None
    d0: int | None = None
    d1: int | None = None
    t: int | None = None
    t0: int | None = None
    t1: int | None = None

    @property
    def decided(self) -> bool:
        return self.adjacent is not None

    @classmethod
    def done(cls, case: str, adjacent: bool) -> "DecodeStep":
        return cls(case, adjacent)

    @classmethod
    def recurse(cls, case: str, d0: int, d1: int, t: int, t0: int, t1: int) -> "DecodeStep":
        return cls(case, None, d0, d1, t, t0, t1)


def _need(mapping, key, what: str, **ctx):
    try:
        return mapping[key]
    except KeyError:
        raise EncodingCorruption(f"missing {what}", {**ctx, "at": key}) from None


# ------------------------------------------------------------------ steps


def decode_shallow_step(enc: ShallowEncoding, c0: int, c1: int, a0: int, a1: int) -> DecodeStep:
    x0 = _need(enc.top, a0, "top", factor=enc.root)
    x1 = _need(enc.top, a1, "top", factor=enc.root)
    if x0 == x1:
        return DecodeStep.recurse("shallow-same", c0, c1, x0, a0, a1)
    ends = []
    for a, c, x in ((a0, c0, x0), (a1, c1, x1)):
        if x == enc.root:
            ends.append((a, c))
        else:
            k = _need(enc.rho_top, a, "rho_top", factor=enc.root)(c)
            ends.append((_need(enc.parent_t, x, "parentT", factor=enc.root), enc.rho_e[x](k)))
    (t0, d0), (t1, d1) = ends
    return DecodeStep.recurse("shallow-root", d0, d1, enc.root, t0, t1)


def _decide(flags: str, ctx) -> DecodeStep | None:
    """Unbiased block: positive means adjacent, negative means not."""
    if "F" in flags or "S" in flags:
        return None
    pos, neg = "P" in flags, "N" in flags
    if pos and not neg:
        return DecodeStep.done("decided+", True)
    if neg and not pos:
        return DecodeStep.done("decided-", False)
    raise EncodingCorruption("unbiased block is neither purely positive nor negative", {**ctx, "flags": flags})


def _lift_child(enc: SplendidEncoding, entry: LhatEntry, kap: int) -> tuple[int, int]:
    """``(parentT(⊤z'), ρ(e(⊤z'))(ϱ(path(x, z'))(κ)))`` for a landmark ``z'``."""
    z = entry.node
    return enc.parent_t[z], enc.rho_e[z](entry.varrho(kap))


def _biased(enc: SplendidEncoding, g_near: int, x_far: int, a_far: int, c_far: int, kap_far: int, ctx):
    """One side lands below ``h_γ(g_γ(x_far))``; the other is lifted by ĝ.

    Returns ``(t, (t_near, d_near), (t_far, d_far))``.
    """
    z = enc.g[g_near].get(x_far)
    if z is None:
        raise EncodingCorruption("g is undefined", {**ctx, "x": x_far})
    z0 = enc.h[g_near].get(z)
    if z0 is None:
        raise EncodingCorruption("h is undefined", {**ctx, "z": z})
    z0p = _need(enc.parent_y, z0, "parentY", **ctx)
    image = {enc.varrho_e[z0](m) for m in enc.classes.classes[g_near]}
    if len(image) != 1:
        raise EncodingCorruption("class is not collapsed by ϱ", {**ctx, "z0": z0})
    near = (enc.parent_t[z0p], enc.rho_e[z0p](image.pop()))
    gh = enc.ghat[g_near].get(x_far)
    if gh is None:
        if x_far != z:
            raise EncodingCorruption("ĝ undefined below g", {**ctx, "x": x_far})
        far = (a_far, c_far)
    else:
        far = (enc.parent_t[gh], enc.rho_e[gh](enc.rho_ghat[g_near][x_far](kap_far)))
    return z, near, far


def decode_splendid_step(enc: SplendidEncoding, c0: int, c1: int, a0: int, a1: int) -> DecodeStep:
    ctx = {"factor": enc.root, "a0": a0, "a1": a1}
    x0 = _need(enc.top, a0, "top", **ctx)
    x1 = _need(enc.top, a1, "top", **ctx)
    k0 = enc.rho_top[a0](c0)
    k1 = enc.rho_top[a1](c1)
    g0, g1 = enc.classes.index(k0), enc.classes.index(k1)
    per_x = _need(enc.lhat, (g0, g1), "lhat slice", **ctx)
    L0 = _need(per_x, x0, "lhat", **ctx)
    L1 = _need(per_x, x1, "lhat", **ctx)
    at1 = {e.node: e for e in L1}
    common = [e.node for e in L0 if e.node in at1]
    if not common:
        raise EncodingCorruption("landmark lists share no node", ctx)
    zt = common[-1]
    if x0 == zt and x1 == zt:
        return DecodeStep.recurse("corner1", c0, c1, zt, a0, a1)
    ch0 = next((e for e in L0 if enc.parent_y.get(e.node) == zt), None)
    ch1 = next((e for e in L1 if enc.parent_y.get(e.node) == zt), None)
    if ch0 is not None and ch1 is not None:
        t0, d0 = _lift_child(enc, ch0, k0)
        t1, d1 = _lift_child(enc, ch1, k1)
        return DecodeStep.recurse("corner2", d0, d1, zt, t0, t1)
    if x0 == zt and ch1 is not None:
        t1, d1 = _lift_child(enc, ch1, k1)
        return DecodeStep.recurse("corner3", c0, d1, zt, a0, t1)
    if x1 == zt and ch0 is not None:
        t0, d0 = _lift_child(enc, ch0, k0)
        return DecodeStep.recurse("corner3", d0, c1, zt, t0, a1)

    tops0 = [e for e in L0 if e.block_start]
    tops1 = [e for e in L1 if e.block_start]
    i = -1
    for e0, e1 in zip(tops0, tops1):
        if e0.node != e1.node:
            break
        i += 1
    if i < 0:
        raise EncodingCorruption("no shared block top", ctx)
    A, B = tops0[i].flags, tops1[i].flags
    if "X" in A or "X" in B:
        raise EncodingCorruption("fully mixed block at the divergence point", ctx)
    for flags in (A, B):
        step = _decide(flags, ctx)
        if step is not None:
            return step
    first = "F" in A and "F" in B
    second = "S" in A and "S" in B
    if first and not second:
        z, (t0, d0), (t1, d1) = _biased(enc, g0, x1, a1, c1, k1, ctx)
        return DecodeStep.recurse("first-biased", d0, d1, z, t0, t1)
    if second and not first:
        z, (t1, d1), (t0, d0) = _biased(enc, g1, x0, a0, c0, k0, ctx)
        return DecodeStep.recurse("second-biased", d0, d1, z, t0, t1)
    raise EncodingCorruption("biased blocks disagree", {**ctx, "A": A, "B": B})


# ------------------------------------------------------- reading J* back


def _fun(j: EncodedStructure, level: int, name: str, nodes) -> dict[int, int]:
    fmap = j.funs.get((level, name), {})
    return {a: fmap[a] for a in nodes if a in fmap}


def _tagged(j: EncodedStructure, level: int, name: str, nodes) -> dict[int, str]:
    key = f"{level}.{name}"
    out = {}
    for a in nodes:
        v = j.tags.get(a, {}).get(key)
        if v is not None:
            out[a] = v
    return out


def read_factor(j: EncodedStructure, level: int, root: int, nodes=None):
    """Rebuild the encoding of the factor ``root`` at ``level``; ``None`` if absent."""
    kind = j.tag(level, root, "kind")
    if kind is None:
        return None
    if nodes is None:
        nodes = [a for a, r in j.rooti[level].items() if r == root]
    parse = SkFun.parse
    parent_t = _fun(j, level, "parentT", nodes)
    top = _fun(j, level, "top", nodes)
    rho_e = {a: parse(v) for a, v in _tagged(j, level, "rho_e", nodes).items()}
    rho_top = {a: parse(v) for a, v in _tagged(j, level, "rho_top", nodes).items()}
    if kind == SHALLOW:
        return ShallowEncoding(j.k, root, parent_t, rho_e, top, rho_top)
    if kind != SPLENDID:
        raise EncodingCorruption("unknown factor kind", {"level": level, "root": root, "kind": kind})
    classes = RamseyPartition.decode(j.tag(level, root, "classes"))
    n = len(classes)
    tops = sorted(set(top.values()))
    lhat: dict = {}
    for g0 in range(n):
        for g1 in range(n):
            per_x = {x: [] for x in tops}
            idx = 0
            while True:
                name = f"lhat.{g0}.{g1}.{idx}"
                targets = _fun(j, level, name, tops)
                if not targets:
                    break
                texts = _tagged(j, level, name, tops)
                for x, y in targets.items():
                    per_x[x].append(LhatEntry.from_tag(y, texts[x]))
                idx += 1
            lhat[(g0, g1)] = per_x
    return SplendidEncoding(
        k=j.k,
        root=root,
        classes=classes,
        parent_t=parent_t,
        parent_y=_fun(j, level, "parentY", tops),
        rho_e=rho_e,
        varrho_e={a: parse(v) for a, v in _tagged(j, level, "varrho_e", tops).items()},
        top=top,
        rho_top=rho_top,
        g=[_fun(j, level, f"g.{c}", tops) for c in range(n)],
        ghat=[_fun(j, level, f"ghat.{c}", tops) for c in range(n)],
        h=[_fun(j, level, f"h.{c}", tops) for c in range(n)],
        rho_ghat=[
            {a: parse(v) for a, v in _tagged(j, level, f"rho_ghat.{c}", tops).items()}
            for c in range(n)
        ],
        lhat=lhat,
    )


class Decoder:
    """Answers adjacency queries on J*, caching factor views and sub-queries."""

    def __init__(self, j: EncodedStructure):
        self.j = j
        self._views: dict[tuple[int, int], object] = {}
        self._members: dict[int, dict[int, list[int]]] = {}
        self._memo: dict[tuple, bool] = {}

    def _view(self, level: int, root: int):
        key = (level, root)
        if key not in self._views:
            members = self._members.get(level)
            if members is None:
                members = {}
                for a, r in self.j.rooti[level].items():
                    members.setdefault(r, []).append(a)
                self._members[level] = members
            self._views[key] = read_factor(self.j, level, root, members.get(root, []))
        return self._views[key]

    def _solve(self, level: int, c0: int, c1: int, a0: int, a1: int, trace) -> bool:
        key = (level, c0, c1, a0, a1)
        if trace is None and key in self._memo:
            return self._memo[key]
        j = self.j
        if level == 1:
            if a0 != a1:
                raise EncodingCorruption("level-1 query spans two nodes", {"a0": a0, "a1": a1})
            ans = (c0, c1) in _need(j.eta1, a0, "eta1")
            if trace is not None:
                trace.append(f"level=1 node={a0} case=eta colors=({c0},{c1}) adjacent={ans}")
        else:
            rooti = _need(j.rooti, level, "level")
            root = _need(rooti, a0, "root", level=level)
            if _need(rooti, a1, "root", level=level) != root:
                raise EncodingCorruption("query spans two factors", {"level": level, "a0": a0, "a1": a1})
            enc = self._view(level, root)
            if enc is None:
                if trace is not None:
                    trace.append(f"level={level} factor={root} case=pass")
                ans = self._solve(level - 1, c0, c1, a0, a1, trace)
            else:
                stepper = decode_splendid_step if enc.kind == SPLENDID else decode_shallow_step
                step = stepper(enc, c0, c1, a0, a1)
                if trace is not None:
                    trace.append(_trace_line(level, root, step))
                if step.decided:
                    ans = step.adjacent
                else:
                    ans = self._solve(level - 1, step.d0, step.d1, step.t0, step.t1, trace)
        self._memo[key] = ans
        return ans

    def adjacent(self, u0: int, u1: int, trace: list[str] | None = None) -> bool:
        j = self.j
        if u0 not in j.pi or u1 not in j.pi:
            raise InputError(f"unknown vertex {u0 if u0 not in j.pi else u1}")
        if u0 == u1:
            return False
        return self._solve(j.levels, j.chi[u0], j.chi[u1], j.pi[u0], j.pi[u1], trace)


def _trace_line(level: int, root: int, step: DecodeStep) -> str:
    head = f"level={level} factor={root} case={step.case}"
    if step.decided:
        return f"{head} adjacent={step.adjacent}"
    return f"{head} t={step.t} t0={step.t0} t1={step.t1} d0={step.d0} d1={step.d1}"


def decode_adjacent(j: EncodedStructure, u0: int, u1: int, trace: list[str] | None = None) -> bool:
    return Decoder(j).adjacent(u0, u1, trace)


def decode_full(j: EncodedStructure) -> Graph:
    dec = Decoder(j)
    verts = j.vertices
    edges = [(u, v) for u, v in combinations(verts, 2) if dec.adjacent(u, v)]
    return Graph(verts, edges)
