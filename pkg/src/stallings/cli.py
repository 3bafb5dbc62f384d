"""Command-line front end.

Inputs are subgroup files (``rank: r`` then one generator per line) or graph
text as printed by ``build``. Output lines are prefixed with a stable key.
Exit status is 1 on parse errors and 2 on semantic errors.
"""

import argparse
import gc
import sys
import time
from pathlib import Path

from . import fi, graph, malnormal
from .formats import format_graph, format_subgroup, is_graph_text, parse_graph, parse_subgroup, to_dot
from .generate import RandomSpec, random_graph, random_subgroup
from .words import Basis, ParseError, format_word, parse_word, reduce

BENCH_SIZES = (10**3, 10**4, 10**5, 10**6)


def load(path: str) -> graph.StallingsGraph:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror}") from None
    try:
        if is_graph_text(text):
            return parse_graph(text)
        basis, gens = parse_subgroup(text)
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None
    return graph.build_graph(basis, [reduce(w) for w in gens])


def _word(g: graph.StallingsGraph, text: str):
    return reduce(parse_word(text, Basis(g.rank)))


def _flag(b) -> str:
    return "true" if b else "false"


def _emit_graph(args, g, out):
    out.append(format_graph(g).rstrip("\n"))
    if getattr(args, "dot", None):
        Path(args.dot).write_text(to_dot(g))


def cmd_build(args, out):
    _emit_graph(args, load(args.file), out)


def cmd_member(args, out):
    g = load(args.file)
    out.append(f"member: {_flag(graph.membership(g, _word(g, args.word)))}")


def cmd_decompose(args, out):
    d = graph.decompose(load(args.file))
    out.append(f"tail: {format_word(d.tail_word)}")
    out.append(f"core-entry: {d.core_entry}")
    out.append("core: " + " ".join(map(str, d.core_vertices)))
    out.append("tail-vertices: " + " ".join(map(str, d.tail_vertices)))


def _fi_index(args):
    h, g = load(args.h), load(args.g)
    return graph.is_fi_extension(h, g)


def cmd_index(args, out):
    d = _fi_index(args)
    out.append(f"index: {d if d is not None else 'infinite'}")


def cmd_is_fi_ext(args, out):
    d = _fi_index(args)
    out.append(f"fi-extension: {_flag(d is not None)}")
    if d is not None:
        out.append(f"index: {d}")


def cmd_commensurator(args, out):
    h = load(args.file)
    c = fi.commensurator(h)
    _emit_graph(args, c, out)
    out.append(f"index: {graph.is_fi_extension(h, c)}")


def cmd_fi_extensions(args, out):
    lat = fi.enumerate_fi_extensions(load(args.file), cap=args.cap)
    out.append(f"count: {len(lat)}")
    for i, e in enumerate(lat.members):
        out.append(f"extension: {i} index: {e.index}")
        out.append(format_graph(e.graph).rstrip("\n"))
    for i, j in lat.hasse():
        out.append(f"hasse: {i} {j}")


def cmd_fi_bound(args, out):
    closed, rec = fi.fi_extension_bound(args.n)
    out.append(f"bound: {closed:.6g}")
    out.append(f"recurrence: {rec}")


def cmd_subspace_count(args, out):
    out.append(f"count: {fi.subspace_count(args.k)}")


def cmd_fi_equal(args, out):
    out.append(f"fi-equal: {_flag(fi.fi_equivalent(load(args.h), load(args.g)))}")


def cmd_validate_language(args, out):
    rep = fi.validate_extension_language(load(args.file), max_len=args.max_len)
    out.extend(rep.lines())
    out.append(f"valid: {_flag(rep.ok)}")


def cmd_intersect(args, out):
    _emit_graph(args, graph.intersect(load(args.h), load(args.g)), out)


def cmd_join(args, out):
    _emit_graph(args, graph.join(load(args.h), load(args.g)), out)


def cmd_conjugate(args, out):
    h = load(args.file)
    _emit_graph(args, graph.conjugate(h, _word(h, args.word)), out)


def cmd_index_r(args, out):
    _emit_graph(args, graph.index_r_subgroup(load(args.file), args.r), out)


def cmd_is_malnormal(args, out):
    out.append(f"malnormal: {_flag(malnormal.is_malnormal(load(args.file)))}")


def cmd_malnormal_closure(args, out):
    chain = malnormal.malnormal_closure_sequence(load(args.file))
    if args.trace:
        for i, g in enumerate(chain[:-1]):
            out.append(f"step: {i}")
            out.append(format_graph(g).rstrip("\n"))
    _emit_graph(args, chain[-1], out)
    out.append(f"rounds: {len(chain) - 1}")


def cmd_random(args, out):
    spec = RandomSpec(args.rank, args.gens, args.max_len, args.seed)
    out.append(format_subgroup(Basis(spec.rank), random_subgroup(spec)).rstrip("\n"))


def cmd_bench(args, out):
    for n in args.sizes:
        g = random_graph(n, rank=args.rank, seed=args.seed)
        gc.disable()
        try:
            t = time.perf_counter()
            fi.commensurator(g)
            dt = time.perf_counter() - t
        finally:
            gc.enable()
        out.append(f"size: {g.n} time: {dt:.4f}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stallings", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, *positional, dot=False):
        s = sub.add_parser(name)
        for arg in positional:
            s.add_argument(arg)
        if dot:
            s.add_argument("--dot", metavar="OUT", help="also write the result as DOT")
        s.set_defaults(fn=fn)
        return s

    add("build", cmd_build, "file", dot=True)
    add("member", cmd_member, "file", "word")
    add("decompose", cmd_decompose, "file")
    add("index", cmd_index, "h", "g")
    add("is-fi-ext", cmd_is_fi_ext, "h", "g")
    add("commensurator", cmd_commensurator, "file", dot=True)
    s = add("fi-extensions", cmd_fi_extensions, "file")
    s.add_argument("--cap", type=int, default=fi.DEFAULT_CAP)
    add("fi-bound", cmd_fi_bound).add_argument("n", type=int)
    add("subspace-count", cmd_subspace_count).add_argument("k", type=int)
    add("fi-equal", cmd_fi_equal, "h", "g")
    s = add("validate-language", cmd_validate_language, "file")
    s.add_argument("--max-len", type=int, default=6)
    add("intersect", cmd_intersect, "h", "g", dot=True)
    add("join", cmd_join, "h", "g", dot=True)
    add("conjugate", cmd_conjugate, "file", "word", dot=True)
    add("index-r", cmd_index_r, "file", dot=True).add_argument("r", type=int)
    add("is-malnormal", cmd_is_malnormal, "file")
    s = add("malnormal-closure", cmd_malnormal_closure, "file", dot=True)
    s.add_argument("--trace", action="store_true", help="print every intermediate graph")
    s = add("random", cmd_random)
    s.add_argument("--rank", type=int, default=2)
    s.add_argument("--gens", type=int, default=3)
    s.add_argument("--max-len", type=int, default=8)
    s.add_argument("--seed", type=int, default=0)
    s = add("bench", cmd_bench)
    s.add_argument("--sizes", type=int, nargs="+", default=list(BENCH_SIZES))
    s.add_argument("--rank", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    return p


def run(argv=None):
    """Run one command; returns (exit code, stdout text)."""
    args = build_parser().parse_args(argv)
    out = []
    try:
        args.fn(args, out)
    except ParseError as e:
        return 1, f"error: {e}\n"
    except (ValueError, fi.EnumerationCapExceeded) as e:
        return 2, f"error: {e}\n"
    return 0, "\n".join(out) + "\n"


def main(argv=None):
    code, text = run(argv)
    (sys.stderr if code else sys.stdout).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
