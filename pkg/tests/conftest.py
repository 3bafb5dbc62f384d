import random

import pytest
from hypothesis import strategies as st

from stallings.fi import identify_and_fold
from stallings.generate import random_word
from stallings.graph import StallingsGraph, build_graph, core_automaton
from stallings.words import reduce


def small_subgroups(count, max_vertices, seed=0, rank=2, max_len=6, max_gens=3,
                    core_limit=False, nontrivial=True, min_vertices=1):
    """Deterministic list of random subgroup graphs under a size limit.

    The limit applies to the core when ``core_limit`` is set, otherwise to
    the whole graph.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        gens = [random_word(rng, rank, rng.randint(1, max_len))
                for _ in range(rng.randint(1, max_gens))]
        g = build_graph(rank, gens)
        if nontrivial and g.is_trivial():
            continue
        size = len(core_automaton(g)) if core_limit else g.n
        if min_vertices <= size <= max_vertices:
            out.append(g)
    return out


def cover_subgroups(count, max_vertices, seed=0, rank=2, core_limit=False):
    """Finite-index subgroups of random small subgroups: inputs whose
    extension lattices are not just a point."""
    from stallings.graph import index_r_subgroup
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        (h,) = small_subgroups(1, max_vertices // 2, seed=rng.random(), rank=rank, max_len=4)
        g = index_r_subgroup(h, rng.randint(2, 4))
        size = len(core_automaton(g)) if core_limit else g.n
        if size <= max_vertices:
            out.append(g)
    return out


def set_partitions(items):
    """Every partition of ``items`` as a list of blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def all_quotients(h: StallingsGraph):
    """Folded quotients of ``h`` by every vertex partition, deduplicated."""
    seen = {}
    for part in set_partitions(range(h.n)):
        pairs = [(b[0], v) for b in part for v in b[1:]]
        g = identify_and_fold(h, pairs)
        seen.setdefault(g.key(), g)
    return list(seen.values())


def language(g: StallingsGraph, v: int, max_len: int, reduced=True):
    """Words of length <= max_len readable from v (reduced ones by default)."""
    words = {()}
    layer = [((), v)]
    letters = [x for k in range(1, g.rank + 1) for x in (k, -k)]
    for _ in range(max_len):
        nxt = []
        for w, s in layer:
            for x in letters:
                if reduced and w and w[-1] == -x:
                    continue
                t = g.step(s, x)
                if t >= 0:
                    nxt.append((w + (x,), t))
        words.update(w for w, _ in nxt)
        layer = nxt
    return words


@st.composite
def words(draw, rank=2, max_size=12):
    letters = st.integers(1, rank).flatmap(lambda k: st.sampled_from([k, -k]))
    return tuple(draw(st.lists(letters, max_size=max_size)))


@st.composite
def subgroups(draw, rank=2, max_gens=3, max_len=8):
    gens = draw(st.lists(words(rank, max_len), min_size=0, max_size=max_gens))
    return build_graph(rank, [reduce(w) for w in gens])


@pytest.fixture(scope="session")
def small8():
    return small_subgroups(100, 8, seed=8)


# -- acceptance report ---------------------------------------------------------

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
