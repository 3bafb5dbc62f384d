"""Subgroup files, graph text and DOT export.

Subgroup file::

    rank: 2
    # comment
    aa
    abA

Graph text is an optional ``rank: r`` line followed by the canonical form:
``vertices: n``, ``base: 0`` and one ``p a q`` line per positive edge.
"""

from typing import List, Tuple

from .graph import StallingsGraph, canonical_form
from .words import Basis, ParseError, Word, format_word, letter_name, parse_word


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _header(line: str, key: str, lineno: int) -> int:
    name, sep, value = line.partition(":")
    if not sep or name.strip() != key:
        raise ParseError(f"line {lineno}: expected '{key}: <int>'")
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"line {lineno}: bad integer {value.strip()!r}") from None


def parse_subgroup(text: str) -> Tuple[Basis, List[Word]]:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty subgroup file: missing 'rank: r' line")
    lineno, first = lines[0]
    try:
        basis = Basis(_header(first, "rank", lineno))
    except ValueError as e:
        raise ParseError(str(e)) from None
    gens = []
    for lineno, line in lines[1:]:
        try:
            gens.append(parse_word(line, basis))
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}") from None
    return basis, gens


def format_subgroup(basis: Basis, generators: List[Word]) -> str:
    return "\n".join([f"rank: {basis.rank}"] + [format_word(w) for w in generators]) + "\n"


def is_graph_text(text: str) -> bool:
    return any(line.startswith("vertices:") for _, line in _content_lines(text))


def parse_graph(text: str, rank: int = None) -> StallingsGraph:
    lines = list(_content_lines(text))
    if lines and lines[0][1].startswith("rank:"):
        rank = _header(lines[0][1], "rank", lines[0][0])
        lines = lines[1:]
    if len(lines) < 2:
        raise ParseError("graph text needs 'vertices:' and 'base:' lines")
    n = _header(lines[0][1], "vertices", lines[0][0])
    if _header(lines[1][1], "base", lines[1][0]) != 0:
        raise ParseError("base must be 0")
    edges = []
    for lineno, line in lines[2:]:
        parts = line.split()
        if len(parts) != 3 or len(parts[1]) != 1 or not parts[1].islower():
            raise ParseError(f"line {lineno}: expected 'p a q'")
        try:
            p, q = int(parts[0]), int(parts[2])
        except ValueError:
            raise ParseError(f"line {lineno}: bad vertex id") from None
        edges.append((p, ord(parts[1]) - ord("a") + 1, q))
    if rank is None:
        rank = max((k for _, k, _ in edges), default=1)
    try:
        g = StallingsGraph.from_edges(rank, n, edges)
    except ValueError as e:
        raise ParseError(str(e)) from None
    if g.n != n:
        raise ParseError("graph is not connected")
    return g


def format_graph(g: StallingsGraph) -> str:
    return f"rank: {g.rank}\n{canonical_form(g)}\n"


def to_dot(g: StallingsGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{", '  0 [shape=doublecircle];']
    for p, k, q in sorted(g.edges()):
        lines.append(f'  {p} -> {q} [label="{letter_name(k)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
