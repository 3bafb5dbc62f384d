import random

import pytest
from hypothesis import given, settings, strategies as st

from stallings.fi import commensurator, enumerate_fi_extensions
from stallings.formats import format_graph, parse_graph, parse_subgroup, to_dot
from stallings.generate import random_word
from stallings.graph import (StallingsGraph, StepKind, add_generator, build_graph, canonical_form,
                             conjugate, decompose, fold, free_rank, homomorphism,
                             index_r_subgroup, intersect, is_fi_extension, join, membership,
                             path_read, schreier_generators, trivial_graph)
from stallings.words import Basis, ParseError, common_prefix, concat_reduced, invert, parse_word, reduce

from conftest import small_subgroups, subgroups, words

B2 = Basis(2)


def G(*gens, rank=2):
    return build_graph(rank, [reduce(parse_word(g, Basis(rank))) for g in gens])


def edge_set(g):
    return sorted(g.edges())


# -- examples -----------------------------------------------------------------

def test_build_examples():
    assert g_edges("aa") == [(0, 1, 1), (1, 1, 0)]
    f = G("a", "b")
    assert f.n == 1 and edge_set(f) == [(0, 1, 0), (0, 2, 0)]
    c = G("abAB")
    assert c.n == 4 and c.n_edges == 4
    # 0 -a-> 1 -b-> 2 <-a- 3 <-b- 0
    assert path_read(c, 0, (1, 2, -1, -2)) == 0
    assert path_read(c, 0, (1, 2)) == path_read(c, 0, (2, 1)) != 0
    assert path_read(c, 0, (1, 1)) is None


def g_edges(*gens):
    return edge_set(G(*gens))


def test_fold_examples():
    g = fold(1, 3, [(0, 1, 1), (0, 1, 2)], prune=False)
    assert g.n == 2
    h = G("aa")
    assert fold(2, h.n, h.edges()) == h
    # bouquet of aa and ab: 0 -a-> 1 -a-> 0, 0 -a-> 2 -b-> 0
    g = fold(2, 3, [(0, 1, 1), (1, 1, 0), (0, 1, 2), (2, 2, 0)])
    assert edge_set(g) == [(0, 1, 1), (1, 1, 0), (1, 2, 0)]


def test_from_edges_rejects_nondeterminism():
    with pytest.raises(ValueError, match="determinism"):
        StallingsGraph.from_edges(1, 3, [(0, 1, 1), (0, 1, 2)])


def test_build_rejects_out_of_range_letters():
    with pytest.raises(ValueError):
        build_graph(1, [(2,)])


def test_path_read_and_membership():
    h = G("aa")
    assert path_read(h, 0, (1, 1)) == 0
    assert path_read(h, 1, ()) == 1
    assert path_read(h, 0, (2,)) is None
    assert membership(h, (1,) * 4)
    assert not membership(h, (1,) * 3)
    assert membership(h, ())


def test_decompose_examples():
    d = decompose(G("abA"))
    assert d.tail_word == (1,) and d.core_entry == 1 and d.core_vertices == (1,)
    assert decompose(G("aa")).tail_word == ()
    assert decompose(G("aa")).core_vertices == (0, 1)
    assert decompose(G("a", "b")).tail_word == ()
    t = decompose(trivial_graph(2))
    assert t.core_vertices == (0,) and t.tail_word == ()


def test_homomorphism_examples():
    phi = homomorphism(G("aa"), G("a"))
    assert phi.map == (0, 0)
    assert homomorphism(G("a"), G("b")) is None
    h = G("abAB")
    assert homomorphism(h, h).map == tuple(range(h.n))


def test_is_fi_extension_examples():
    assert is_fi_extension(G("aa"), G("a")) == 2
    h = G("abA")
    assert is_fi_extension(h, h) == 1
    assert is_fi_extension(G("aa"), G("aa", "b")) is None


def test_conjugate_examples():
    c = conjugate(G("a"), (2,))
    # H^b = b^-1 a b
    assert c == G("Bab")
    assert decompose(c).tail_word == (-2,)
    h = G("abA")
    assert conjugate(h, ()) == h
    assert conjugate(G("aa"), (1,)) == G("aa")


def test_join_and_intersect_examples():
    assert join(G("aa"), G("aaa")) == G("a")
    h = G("abA", "bb")
    assert join(h, trivial_graph(2)) == h
    assert join(G("a"), G("b")) == G("a", "b")
    assert intersect(G("aa"), G("aaa")) == G("a^6")
    assert intersect(G("a"), G("b")).is_trivial()
    assert intersect(h, G("a", "b")) == h
    with pytest.raises(ValueError):
        join(G("a"), G("a", rank=3))


def test_index_r_examples():
    f = G("a", "b")
    g = index_r_subgroup(f, 3)
    assert (g.n, g.n_edges, free_rank(g)) == (3, 6, 4)
    assert is_fi_extension(g, f) == 3
    assert index_r_subgroup(G("abA"), 1) == G("abA")
    assert index_r_subgroup(G("a"), 2) == G("aa")
    with pytest.raises(ValueError):
        index_r_subgroup(trivial_graph(2), 2)
    with pytest.raises(ValueError):
        index_r_subgroup(f, 0)


def test_index_r_disconnected_layering_case():
    # stacking copies of the 2-cycle of <a^2> cannot be joined by a-edges
    h = G("aa")
    for r in (2, 3, 4):
        assert is_fi_extension(index_r_subgroup(h, r), h) == r


def test_add_generator_examples():
    h = G("aa")
    g, step = add_generator(h, (1, 1))
    assert step.kind is StepKind.NOOP and g == h
    g, step = add_generator(h, (2,))
    assert step.kind is StepKind.RE and g == G("aa", "b")
    g, step = add_generator(h, (1,))
    assert step.kind is StepKind.I and (step.p, step.q) == (0, 1) and g == G("a")
    assert str(step) == "i-step 0=1"


def test_canonical_form_text():
    assert canonical_form(G("aa")) == "vertices: 2\nbase: 0\n0 a 1\n1 a 0"
    assert canonical_form(G("a")) != canonical_form(G("b"))


def test_canonical_form_relabeling_invariant():
    h = G("abAB", "aabb")
    perm = list(range(1, h.n))
    random.Random(1).shuffle(perm)
    perm = [0] + perm
    edges = [(perm[p], k, perm[q]) for p, k, q in h.edges()]
    raw = StallingsGraph.from_edges(2, h.n, edges, normalize=False)
    assert canonical_form(raw) == canonical_form(h)


# -- file formats ---------------------------------------------------------------

def test_parse_subgroup_file():
    basis, gens = parse_subgroup("rank: 2\n# two generators\naa  # square\n\nabA\n")
    assert basis.rank == 2 and gens == [(1, 1), (1, 2, -1)]


@pytest.mark.parametrize("text", ["", "aa\n", "rank: x\n", "rank: 2\nac\n", "rank: 30\n"])
def test_parse_subgroup_errors(text):
    with pytest.raises(ParseError):
        parse_subgroup(text)


def test_graph_text_round_trip_and_errors():
    g = G("abA", "bab")
    assert parse_graph(format_graph(g)) == g
    with pytest.raises(ParseError):
        parse_graph("vertices: 2\nbase: 0\n")
    with pytest.raises(ParseError):
        parse_graph("vertices: 2\nbase: 1\n0 a 1\n")
    with pytest.raises(ParseError):
        parse_graph("vertices: 2\nbase: 0\n0 a 1\n0 a 0\n")


def test_dot_export():
    dot = to_dot(G("aa"))
    assert dot.count("->") == 2 and 'label="a"' in dot


# -- properties -----------------------------------------------------------------

@settings(max_examples=200)
@given(subgroups(rank=2), st.randoms(use_true_random=False))
def test_build_is_folded_admissible_and_order_free(h, rnd):
    assert h.is_admissible()
    for v in range(h.n):
        for x in (1, -1, 2, -2):
            t = h.step(v, x)
            assert t < 0 or h.step(t, -x) == v
    gens = schreier_generators(h)
    rnd.shuffle(gens)
    assert build_graph(2, gens) == h


@settings(max_examples=150)
@given(subgroups(rank=2), subgroups(rank=2))
def test_graph_text_round_trip(h, k):
    g = join(h, k)
    assert canonical_form(parse_graph(format_graph(g))) == canonical_form(g)


def test_membership_of_generated_elements():
    rng = random.Random(0)
    for _ in range(30):
        gens = [random_word(rng, 2, rng.randint(1, 7)) for _ in range(rng.randint(1, 3))]
        h = build_graph(2, gens)
        assert all(membership(h, g) for g in gens)
        for _ in range(35):
            w = ()
            for _ in range(rng.randint(0, 6)):
                g = rng.choice(gens)
                w = concat_reduced(w, g if rng.random() < 0.5 else invert(g))
            assert membership(h, w)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_membership_cyclic_brute_force(k):
    h = build_graph(2, [(1,) * k])
    rng = random.Random(k)
    for _ in range(250):
        w = random_word(rng, 2, rng.randint(0, 12))
        expected = (not w) or (set(w) <= {1} and len(w) % k == 0) or (set(w) <= {-1} and len(w) % k == 0)
        assert membership(h, w) == expected


def _loops(h, rng, count):
    gens = schreier_generators(h)
    out = []
    while len(out) < count:
        w = ()
        for _ in range(rng.randint(1, 5)):
            g = rng.choice(gens)
            w = concat_reduced(w, g if rng.random() < 0.5 else invert(g))
        if w:
            out.append(w)
    return out


def test_tail_is_common_prefix_of_elements():
    rng = random.Random(3)
    for h in small_subgroups(60, 14, seed=3):
        assert decompose(h).tail_word == common_prefix(_loops(h, rng, 50))


def _on_cyclically_reduced_loop(g, v):
    # search the non-backtracking walks; state = (vertex, last letter, first letter)
    letters = [x for k in range(1, g.rank + 1) for x in (k, -k)]
    start = [(g.step(v, x), x, x) for x in letters if g.step(v, x) >= 0]
    seen = set(start)
    stack = list(start)
    while stack:
        u, last, first = stack.pop()
        if u == v and last != -first:
            return True
        for x in letters:
            t = g.step(u, x)
            if x != -last and t >= 0 and (t, x, first) not in seen:
                seen.add((t, x, first))
                stack.append((t, x, first))
    return False


def test_core_vertices_carry_cyclically_reduced_loops():
    for h in small_subgroups(80, 12, seed=4):
        core = set(decompose(h).core_vertices)
        for v in range(h.n):
            assert (v in core) == _on_cyclically_reduced_loop(h, v)


def _fi_pairs():
    pairs = []
    for h in small_subgroups(40, 8, seed=5, min_vertices=2):
        for e in enumerate_fi_extensions(h).members:
            pairs.append((h, e.graph, e.index))
    return pairs


def test_fiber_sizes_and_cover_powers():
    for h, g, d in _fi_pairs():
        assert is_fi_extension(h, g) == d
        phi = homomorphism(h, g).map
        dh, dg = decompose(h), decompose(g)
        fibers = {q: [] for q in dg.core_vertices}
        for p in dh.core_vertices:
            fibers[phi[p]].append(p)
        assert all(len(f) == d for f in fibers.values())
        c = dg.core_entry
        loops = [u for u in _reduced_words(g, c, 6) if u and path_read(g, c, u) == c]
        for u in loops:
            for p in fibers[c]:
                assert any(path_read(h, p, reduce(u * m)) == p for m in range(1, d + 1))
        if dh.tail_word == ():
            assert dg.tail_word == ()


def _reduced_words(g, v, n):
    out = [()]
    layer = [((), v)]
    for _ in range(n):
        layer = [(w + (x,), g.step(s, x)) for w, s in layer for x in (1, -1, 2, -2)
                 if g.step(s, x) >= 0 and not (w and w[-1] == -x)]
        out += [w for w, _ in layer]
    return out


@settings(max_examples=150)
@given(subgroups(rank=2), subgroups(rank=2), words(max_size=10))
def test_intersect_and_join(h, k, w):
    w = reduce(w)
    assert membership(intersect(h, k), w) == (membership(h, w) and membership(k, w))
    j = join(h, k)
    assert homomorphism(h, j) is not None and homomorphism(k, j) is not None


@settings(max_examples=100)
@given(subgroups(rank=2, max_len=6), words(max_size=5), words(max_size=8))
def test_conjugate_membership(h, g, w):
    # w in g^-1 H g  iff  g w g^-1 in H
    g, w = reduce(g), reduce(w)
    c = conjugate(h, g)
    assert membership(c, w) == membership(h, reduce(g + w + invert(g)))


@settings(max_examples=100)
@given(subgroups(rank=2, max_len=6), words(max_size=8))
def test_add_generator_matches_join(h, g):
    g = reduce(g)
    new, step = add_generator(h, g)
    assert new == join(h, build_graph(2, [g]))
    if step.kind is StepKind.I:
        assert new == fold(2, h.n, h.edges(), identify=[(step.p, step.q)])


def test_replaying_extension_generators_only_uses_i_steps():
    for h, g, _ in _fi_pairs():
        cur = h
        for gen in schreier_generators(g):
            cur, step = add_generator(cur, gen)
            assert step.kind in (StepKind.I, StepKind.NOOP)
        assert cur == g


@settings(max_examples=60, deadline=None)
@given(subgroups(rank=2, max_len=6), st.sampled_from([1, 2, 3, 5]))
def test_index_r_property(h, r):
    if h.is_trivial():
        return
    assert is_fi_extension(index_r_subgroup(h, r), h) == r


def test_commensurator_of_index_r_contains_h():
    for h in small_subgroups(20, 8, seed=6):
        g = index_r_subgroup(h, 2)
        assert homomorphism(h, commensurator(g)) is not None


def test_vectorized_paths_match_python(monkeypatch):
    import stallings.fi as fi_mod
    import stallings.graph as graph_mod
    hs = small_subgroups(40, 14, seed=7)
    covers = [index_r_subgroup(h, 3) for h in hs[:10]]
    expected = [(canonical_form(g), canonical_form(commensurator(g)),
                 len(enumerate_fi_extensions(g))) for g in hs + covers]
    raw = [(g.rank, g.n, list(g.edges())) for g in hs + covers]
    monkeypatch.setattr(graph_mod, "_VECTOR_MIN", 1)
    monkeypatch.setattr(fi_mod, "_VECTOR_MIN", 1)
    for (rank, n, edges), (form, comm, count) in zip(raw, expected):
        g = fold(rank, n, edges)
        assert canonical_form(g) == form
        assert canonical_form(commensurator(g)) == comm
        assert len(enumerate_fi_extensions(g)) == count
