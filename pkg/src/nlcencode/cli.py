"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 invariant or bound failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import decode, encode, factorize, generate, pipeline, sktree, verify
from .errors import (
    EncodingCorruption,
    GenerationError,
    HierarchyError,
    InputError,
    InvariantViolation,
    NlcError,
    RefusalError,
)

EXIT_OK, EXIT_INPUT, EXIT_FAIL, EXIT_IO = 0, 2, 3, 4


class _Fail(Exception):
    """A check ran to completion and found a violation."""


def _use_color() -> bool:
    return "NO_COLOR" not in os.environ and sys.stdout.isatty()


def _mark(ok: bool) -> str:
    word = "ok" if ok else "FAIL"
    if not _use_color():
        return word
    return f"\033[32m{word}\033[0m" if ok else f"\033[31m{word}\033[0m"


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(args, text: str):
    if args.output is None or args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _graph_input(text: str) -> sktree.Graph:
    """Accept a graph file or an NLC-tree file (evaluated first)."""
    first = next((ln.split()[0] for ln in text.splitlines() if ln.split() and not ln.startswith("#")), "")
    if first == "nlc":
        return sktree.generate_graph(sktree.parse_nlc(text))
    return sktree.parse_graph(text)


# ------------------------------------------------------------ subcommands


def cmd_gen(args):
    cfg = generate.GenConfig(
        k=args.k,
        tree_nodes=args.nodes,
        vertices=args.vertices,
        eta_density=Fraction(args.density),
        label_pool=args.pool,
        seed=args.seed,
        reject_ladder_above=args.reject_ladder_above,
    )
    _write(args, sktree.format_nlc(generate.gen_random(cfg)))


def cmd_gen_halfgraph(args):
    if args.chain:
        t = generate.gen_unstable_chain(args.n)
    else:
        t = generate.gen_halfgraph(args.n, k_min=args.k)
    _write(args, sktree.format_nlc(t))


def cmd_eval(args):
    t = sktree.parse_nlc(_read(args.input))
    _write(args, sktree.format_graph(sktree.generate_graph(t)))


def cmd_factorize(args):
    t = sktree.parse_nlc(_read(args.input))
    rf = factorize.recursive_factorize(t)
    audit = factorize.verify_hierarchy(rf)
    text = factorize.format_hierarchy(rf)
    text += f"# depth {audit.depth} bound {audit.depth_bound} {_mark(audit.depth_ok)}\n"
    _write(args, text)
    if not audit.depth_ok:
        raise _Fail("hierarchy deeper than 3k^k")


def cmd_encode(args):
    t = sktree.parse_nlc(_read(args.input))
    rf = factorize.recursive_factorize(t)
    factorize.verify_hierarchy(rf)
    _write(args, encode.serialize_structure(encode.encode_recursive(t, rf)))


def cmd_decode(args):
    j = encode.parse_structure(_read(args.input))
    if args.trace:
        u, v = args.trace
        lines: list[str] = []
        adj = decode.decode_adjacent(j, u, v, trace=lines)
        _write(args, "\n".join(lines + [f"adjacent {u} {v} {str(adj).lower()}"]) + "\n")
        return
    _write(args, sktree.format_graph(decode.decode_full(j)))


def cmd_roundtrip(args):
    t = sktree.parse_nlc(_read(args.input))
    rf = factorize.recursive_factorize(t)
    factorize.verify_hierarchy(rf)
    j = encode.parse_structure(encode.serialize_structure(encode.encode_recursive(t, rf)))
    g, back = sktree.generate_graph(t), decode.decode_full(j)
    diff = g.edges ^ back.edges
    _write(args, f"roundtrip {_mark(not diff)} pairs={g.n * (g.n - 1) // 2} mismatches={len(diff)}\n")
    if diff:
        raise _Fail("decoded graph differs")


def cmd_verify(args):
    t = sktree.parse_nlc(_read(args.input))
    report, _ = pipeline.run_pipeline(t, ladder_cap=args.cap, ladder_budget=args.budget)
    _write(args, report.audit.report())
    if not report.audit.hard_ok:
        raise _Fail("bound audit failed")


def cmd_ladder(args):
    g = _graph_input(_read(args.input))
    h, exact = verify.ladder_search(g, args.cap, args.budget)
    note = " truncated" if h >= args.cap else ("" if exact else " lower-bound")
    _write(args, f"ladder {h}{note}\n")


def cmd_chi(args):
    g = _graph_input(_read(args.input))
    omega, chi = verify.clique_number(g), verify.chi_upper(g)
    ratio = f"{chi / omega:.3f}" if omega else "-"
    _write(args, f"omega {omega}\nchi_upper {chi}\nratio {ratio}\n")


def cmd_pipeline(args):
    if args.input:
        t = sktree.parse_nlc(_read(args.input))
    else:
        t = generate.gen_random(pipeline.corpus_config(args.seed))
    report, j = pipeline.run_pipeline(t, ladder_cap=args.cap, ladder_budget=args.budget)
    text = report.format()
    if args.structure:
        with open(args.structure, "w", encoding="utf-8") as fh:
            fh.write(encode.serialize_structure(j))
    _write(args, text)
    if not report.ok:
        raise _Fail("pipeline checks failed")


def cmd_corpus(args):
    lines = []
    bad = 0
    for s, rep in pipeline.run_corpus(args.n, args.seed, ladder_budget=args.budget):
        bad += not rep.ok
        h = f"{rep.h}" + ("" if rep.h_exact else "+")
        lines.append(
            f"seed={s} digest={rep.digest} k={rep.k} depth={rep.depth} "
            f"roundtrip={'ok' if rep.roundtrip_ok else 'FAIL'} h={h} "
            f"audit={'ok' if rep.audit.hard_ok else 'FAIL'} omega={rep.omega} chi={rep.chi}"
        )
    lines.append(f"instances={args.n} failures={bad}")
    _write(args, "\n".join(lines) + "\n")
    if bad:
        raise _Fail(f"{bad} instance(s) failed")


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="input file (default: stdin)")
    common.add_argument("--output", "-o", help="output file (default: stdout)")
    common.add_argument("--format", choices=["text"], default="text")

    p = argparse.ArgumentParser(prog="nlcencode", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("gen", cmd_gen, "random k-NLC-tree")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--nodes", type=int, default=10)
    sp.add_argument("--vertices", type=int, default=20)
    sp.add_argument("--density", default="1/2", help="η density as a fraction, e.g. 1/5")
    sp.add_argument("--pool", choices=generate.LABEL_POOLS, default="all")
    sp.add_argument("--reject-ladder-above", type=int, default=None)

    sp = add("gen-halfgraph", cmd_gen_halfgraph, "NLC-tree generating a half-graph")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--chain", action="store_true", help="one vertex per node (long alternations)")

    add("eval", cmd_eval, "generate the graph of an NLC-tree")
    add("factorize", cmd_factorize, "recursive factorization with its checks")
    add("encode", cmd_encode, "build the encoded structure J*")

    sp = add("decode", cmd_decode, "decode the graph from J*")
    sp.add_argument("--trace", nargs=2, type=int, metavar=("U", "V"))

    add("roundtrip", cmd_roundtrip, "encode, serialize, parse, decode, compare")

    for name, fn, help_ in (
        ("verify", cmd_verify, "bound audit of an NLC-tree"),
        ("pipeline", cmd_pipeline, "full pipeline report"),
    ):
        sp = add(name, fn, help_)
        sp.add_argument("--cap", type=int, default=pipeline.LADDER_CAP)
        sp.add_argument("--budget", type=int, default=None, help="ladder search node budget")
        if name == "pipeline":
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--structure", help="also write J* here")

    sp = add("ladder", cmd_ladder, "ladder index of a graph or NLC-tree")
    sp.add_argument("--cap", type=int, default=pipeline.LADDER_CAP)
    sp.add_argument("--budget", type=int, default=None)

    add("chi", cmd_chi, "clique number and greedy coloring bound")

    sp = add("corpus", cmd_corpus, "pipeline over seeded random instances")
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (_Fail, InvariantViolation, HierarchyError, EncodingCorruption) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (InputError, GenerationError, RefusalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NlcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
