"""End-to-end runs: factorize, encode, decode, compare, audit."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .decode import decode_full
from .encode import EncodedStructure, encode_recursive, serialize_structure
from .factorize import recursive_factorize, verify_hierarchy
from .generate import LABEL_POOLS, GenConfig, gen_random
from .sktree import NlcTree, format_nlc, generate_graph
from .verify import BoundAudit, chi_upper, clique_number, ladder_search, max_alternation, scol_audit

__all__ = ["PipelineReport", "corpus_config", "run_pipeline", "run_corpus", "LADDER_CAP"]

LADDER_CAP = 8


@dataclass
class PipelineReport:
    digest: str
    k: int
    nodes: int
    vertices: int
    edges: int
    depth: int
    mismatches: int
    h: int
    h_exact: bool
    audit: BoundAudit
    omega: int
    chi: int
    timings: dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def roundtrip_ok(self) -> bool:
        return self.mismatches == 0

    @property
    def ok(self) -> bool:
        return self.roundtrip_ok and self.audit.hard_ok

    def format(self) -> str:
        """Deterministic text; timings are left out on purpose."""
        h_note = "" if self.h_exact else " (lower bound: search budget hit)"
        head = [
            f"instance {self.digest}",
            f"k={self.k} nodes={self.nodes} vertices={self.vertices} edges={self.edges}",
            f"depth={self.depth}",
            f"roundtrip={'ok' if self.roundtrip_ok else 'FAIL'} mismatches={self.mismatches}",
            f"ladder h={self.h}{h_note}",
            f"omega={self.omega} chi_upper={self.chi}",
        ]
        return "\n".join(head) + "\n" + self.audit.report()


def digest(t: NlcTree) -> str:
    return hashlib.sha256(format_nlc(t).encode()).hexdigest()[:16]


def corpus_config(seed: int, tree_nodes: int = 60, vertices: int = 120) -> GenConfig:
    """The default corpus mix: k alternates 2/3, densities 1/5 and 1/2, all label pools."""
    return GenConfig(
        k=2 + seed % 2,
        tree_nodes=tree_nodes,
        vertices=vertices,
        eta_density=(Fraction(1, 5), Fraction(1, 2))[seed % 4 // 2],
        label_pool=LABEL_POOLS[seed % 3],
        seed=seed,
    )


def run_pipeline(
    t: NlcTree,
    ladder_cap: int = LADDER_CAP,
    ladder_budget: int | None = None,
) -> tuple[PipelineReport, EncodedStructure]:
    clock = {}
    start = time.perf_counter()

    def lap(name):
        nonlocal start
        now = time.perf_counter()
        clock[name] = now - start
        start = now

    rf = recursive_factorize(t)
    verify_hierarchy(rf)
    lap("factorize")
    j = encode_recursive(t, rf)
    lap("encode")
    g = generate_graph(t)
    back = decode_full(j)
    mismatches = len(g.edges ^ back.edges)
    lap("decode")
    h, exact = ladder_search(g, ladder_cap, ladder_budget)
    j.h_audit = h
    lap("ladder")
    audit = scol_audit(j, max(h, 1), t.k, alternation=max_alternation(t, rf),
                       h_truncated=(h >= ladder_cap))
    lap("audit")
    omega, chi = clique_number(g), chi_upper(g)
    lap("chi")
    report = PipelineReport(
        digest=digest(t),
        k=t.k,
        nodes=len(t.tree),
        vertices=len(t.attach),
        edges=g.m,
        depth=rf.depth,
        mismatches=mismatches,
        h=h,
        h_exact=exact,
        audit=audit,
        omega=omega,
        chi=chi,
        timings=clock,
    )
    return report, j


def run_corpus(n: int, seed: int = 0, ladder_budget: int | None = None, **cfg):
    """Yield ``(seed_i, report)`` for instances ``seed .. seed + n - 1``."""
    for s in range(seed, seed + n):
        t = gen_random(corpus_config(s, **cfg))
        report, _ = run_pipeline(t, ladder_budget=ladder_budget)
        yield s, report


def structure_text(j: EncodedStructure) -> str:
    return serialize_structure(j)
