"""Stallings graphs: folding, tail/core split, morphisms and covers.

Vertices are dense ints and the basepoint is always 0. Only positive letters
are stored: ``out[k][p] == q`` iff there is an edge p -a_{k+1}-> q, and
``inn[k][q] == p`` is the reverse index, so inverse letters are answered by
``inn``. Missing transitions are -1.
"""

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .words import Basis, Word, concat_reduced, invert, letter_name, reduce

Edge = Tuple[int, int, int]


class StallingsGraph:
    """A based, deterministic, involutive labeled graph."""

    __slots__ = ("rank", "n", "out", "inn", "canonical", "_key")

    def __init__(self, rank: int, n: int, out: List[List[int]], inn: List[List[int]],
                 canonical: bool = False):
        self.rank = rank
        self.n = n
        self.out = out
        self.inn = inn
        self.canonical = canonical
        self._key = None

    @classmethod
    def from_edges(cls, rank: int, n: int, edges: Iterable[Edge], normalize: bool = True):
        """Build from positive edges (p, k, q), k in 1..rank.

        Raises ValueError if two edges violate determinism. With ``normalize``
        the graph is restricted to the basepoint component and renumbered
        canonically; no pruning or folding is done either way.
        """
        Basis(rank)
        out = [[-1] * n for _ in range(rank)]
        inn = [[-1] * n for _ in range(rank)]
        for p, k, q in edges:
            if not (1 <= k <= rank and 0 <= p < n and 0 <= q < n):
                raise ValueError(f"bad edge {(p, k, q)}")
            if out[k - 1][p] not in (-1, q) or inn[k - 1][q] not in (-1, p):
                raise ValueError(f"edge {(p, k, q)} breaks determinism")
            out[k - 1][p] = q
            inn[k - 1][q] = p
        if normalize:
            return _finalize(rank, n, out, inn, 0, prune=False)[0]
        return cls(rank, n, out, inn)

    @property
    def basis(self) -> Basis:
        return Basis(self.rank)

    def step(self, v: int, x: int) -> int:
        k = abs(x) - 1
        if k >= self.rank:
            return -1
        return self.out[k][v] if x > 0 else self.inn[k][v]

    def letters_at(self, v: int) -> List[int]:
        res = []
        for k in range(self.rank):
            if self.out[k][v] >= 0:
                res.append(k + 1)
            if self.inn[k][v] >= 0:
                res.append(-k - 1)
        return res

    def degree(self, v: int) -> int:
        d = 0
        for k in range(self.rank):
            d += (self.out[k][v] >= 0) + (self.inn[k][v] >= 0)
        return d

    def edges(self) -> Iterator[Edge]:
        for p in range(self.n):
            for k in range(self.rank):
                q = self.out[k][p]
                if q >= 0:
                    yield (p, k + 1, q)

    @property
    def n_edges(self) -> int:
        return sum(1 for row in self.out for q in row if q >= 0)

    def is_trivial(self) -> bool:
        return self.n_edges == 0

    def is_admissible(self) -> bool:
        if not all(self.degree(v) >= 2 for v in range(1, self.n)):
            return False
        seen = _reach(self.rank, self.n, self.out, self.inn, 0)
        return all(seen)

    def key(self) -> str:
        if self._key is None:
            self._key = canonical_form(self)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, StallingsGraph):
            return NotImplemented
        return self.rank == other.rank and self.key() == other.key()

    def __hash__(self):
        return hash((self.rank, self.key()))

    def __repr__(self):
        return f"StallingsGraph(rank={self.rank}, n={self.n}, edges={self.n_edges})"


def free_rank(g: StallingsGraph) -> int:
    """Rank of the represented subgroup (Euler characteristic)."""
    return g.n_edges - g.n + 1


def _reach(rank, n, out, inn, base):
    seen = bytearray(n)
    seen[base] = 1
    stack = [base]
    tables = out + inn
    while stack:
        v = stack.pop()
        for t in tables:
            w = t[v]
            if w >= 0 and not seen[w]:
                seen[w] = 1
                stack.append(w)
    return seen


# from this size on, pruning and renumbering use numpy and a compiled kernel
_VECTOR_MIN = 4096


def _prune(rank, n, out, inn, base):
    """Peel degree-<=1 vertices other than the base; returns alive flags."""
    tables = out + inn
    if n >= _VECTOR_MIN:
        counts = sum((np.asarray(t) >= 0).astype(np.uint8) for t in tables)
        deg = bytearray(counts.tobytes())
        queue = np.nonzero(counts <= 1)[0].tolist()
    else:
        deg = bytearray(n)
        for t in tables:
            for v, w in enumerate(t):
                if w >= 0:
                    deg[v] += 1
        queue = [v for v in range(n) if deg[v] <= 1]
    queue = [v for v in queue if v != base]
    alive = bytearray(b"\x01") * n
    while queue:
        v = queue.pop()
        if not alive[v]:
            continue
        alive[v] = 0
        for t in tables:
            w = t[v]
            if w >= 0 and alive[w]:
                deg[w] -= 1
                if deg[w] == 1 and w != base:
                    queue.append(w)
    return alive


_bfs_kernel = None


def _make_bfs_kernel():
    import numba

    @numba.njit
    def bfs(tables, base, alive):
        n = tables.shape[1]
        newid = np.full(n + 1, -1, dtype=np.int64)  # slot n absorbs index -1
        order = np.empty(n, dtype=np.int64)
        order[0] = base
        newid[base] = 0
        m = 1
        i = 0
        while i < m:
            v = order[i]
            i += 1
            for t in range(tables.shape[0]):
                w = tables[t, v]
                if w >= 0 and newid[w] < 0 and alive[w]:
                    newid[w] = m
                    order[m] = w
                    m += 1
        order = order[:m]
        relabeled = np.empty((tables.shape[0], m), dtype=np.int64)
        for t in range(tables.shape[0]):
            for j in range(m):
                w = tables[t, order[j]]
                relabeled[t, j] = newid[w] if w >= 0 else -1
        return relabeled, newid[:n]

    return bfs


def _finalize_compiled(rank, n, out, inn, base, alive):
    global _bfs_kernel
    if _bfs_kernel is None:
        _bfs_kernel = _make_bfs_kernel()
    tables = np.empty((2 * rank, n), dtype=np.int64)
    for k in range(rank):
        tables[2 * k] = out[k]
        tables[2 * k + 1] = inn[k]
    flags = np.ones(n, dtype=np.uint8) if alive is None else np.frombuffer(alive, dtype=np.uint8)
    relabeled, newid = _bfs_kernel(tables, base, flags)
    rows = relabeled.tolist()
    g = StallingsGraph(rank, relabeled.shape[1], rows[0::2], rows[1::2], canonical=True)
    return g, newid.tolist()


def _finalize(rank, n, out, inn, base, prune=True):
    """Restrict to the basepoint component, optionally prune dead ends, and
    renumber by BFS from the base with letters ordered a1 < A1 < a2 < ...

    Returns the graph and the old-to-new vertex map (-1 for dropped vertices).
    """
    alive = _prune(rank, n, out, inn, base) if prune else None
    if n >= _VECTOR_MIN:
        return _finalize_compiled(rank, n, out, inn, base, alive)
    tables = []
    for k in range(rank):
        tables.append(out[k])
        tables.append(inn[k])
    order = [base]
    newid = [-1] * n
    newid[base] = 0
    append = order.append
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for t in tables:
            w = t[v]
            if w >= 0 and newid[w] < 0 and (alive is None or alive[w]):
                newid[w] = len(order)
                append(w)
    m = len(order)
    nout = [[newid[o[v]] if o[v] >= 0 else -1 for v in order] for o in out]
    ninn = [[newid[r[v]] if r[v] >= 0 else -1 for v in order] for r in inn]
    return StallingsGraph(rank, m, nout, ninn, canonical=True), newid


def _fold(rank, n, edges, base=0, identify=(), prune=True):
    """Stallings folding with union-find. Returns (graph, old-to-new map)."""
    parent = list(range(n))
    adj: List[Optional[Dict[int, int]]] = [{} for _ in range(n)]
    pending = list(identify)

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    for p, k, q in edges:
        a = adj[p]
        if k in a:
            pending.append((a[k], q))
        else:
            a[k] = q
        a = adj[q]
        if -k in a:
            pending.append((a[-k], p))
        else:
            a[-k] = p

    while pending:
        u, v = pending.pop()
        ru, rv = find(u), find(v)
        if ru == rv:
            continue
        if len(adj[ru]) < len(adj[rv]):
            ru, rv = rv, ru
        parent[rv] = ru
        big, small = adj[ru], adj[rv]
        adj[rv] = None
        for x, t in small.items():
            if x in big:
                pending.append((big[x], t))
            else:
                big[x] = t

    out = [[-1] * n for _ in range(rank)]
    inn = [[-1] * n for _ in range(rank)]
    for v in range(n):
        a = adj[v]
        if a is None:
            continue
        for x, t in a.items():
            if x > 0:
                out[x - 1][v] = find(t)
            else:
                inn[-x - 1][v] = find(t)
    g, newid = _finalize(rank, n, out, inn, find(base), prune=prune)
    return g, [newid[find(v)] for v in range(n)]


def fold(rank: int, n: int, edges: Iterable[Edge], base: int = 0,
         identify: Iterable[Tuple[int, int]] = (), prune: bool = True) -> StallingsGraph:
    """Fold an arbitrary labeled graph (positive edges) into a Stallings graph.

    ``identify`` lists extra vertex pairs to merge before folding. Vertices
    outside the basepoint component are dropped.
    """
    return _fold(rank, n, list(edges), base, list(identify), prune)[0]


def bouquet(rank: int, generators: Sequence[Word]) -> Tuple[int, List[Edge]]:
    """Vertex count and positive edges of a loop bouquet at vertex 0."""
    edges = []
    n = 1
    for w in generators:
        if not w:
            continue
        path = [0] + list(range(n, n + len(w) - 1)) + [0]
        n += len(w) - 1
        for i, x in enumerate(w):
            if x > 0:
                edges.append((path[i], x, path[i + 1]))
            else:
                edges.append((path[i + 1], -x, path[i]))
    return n, edges


def build_graph(basis, generators: Sequence[Word]) -> StallingsGraph:
    """The Stallings graph of the subgroup generated by ``generators``."""
    rank = basis.rank if isinstance(basis, Basis) else Basis(basis).rank
    for w in generators:
        if any(not 1 <= abs(x) <= rank for x in w):
            raise ValueError(f"word {w} uses letters outside rank {rank}")
    n, edges = bouquet(rank, [reduce(w) for w in generators])
    return fold(rank, n, edges)


def trivial_graph(rank: int) -> StallingsGraph:
    return StallingsGraph(rank, 1, [[-1] for _ in range(rank)], [[-1] for _ in range(rank)],
                          canonical=True)


def path_read(g: StallingsGraph, v: int, w: Sequence[int]) -> Optional[int]:
    for x in w:
        v = g.step(v, x)
        if v < 0:
            return None
    return v


def membership(g: StallingsGraph, w: Sequence[int]) -> bool:
    return path_read(g, 0, w) == 0


# -- tail and core ------------------------------------------------------------

@dataclass(frozen=True)
class CoreDecomposition:
    tail_word: Word
    core_entry: int
    core_vertices: Tuple[int, ...]
    tail_vertices: Tuple[int, ...]


def decompose(g: StallingsGraph) -> CoreDecomposition:
    """Split ``g`` into the tail from the basepoint and the core.

    The trivial subgroup has core {0} and an empty tail.
    """
    if g.degree(0) != 1:
        return CoreDecomposition((), 0, tuple(range(g.n)), ())
    word = []
    tail = [0]
    v, came = 0, None
    while True:
        x = next(y for y in g.letters_at(v) if y != came)
        w = g.step(v, x)
        word.append(x)
        d = g.degree(w)
        if d >= 3:
            break
        if d < 2:
            raise ValueError("graph is not admissible: the tail ends in a dead end")
        tail.append(w)
        v, came = w, -x
    in_tail = set(tail)
    core = tuple(u for u in range(g.n) if u not in in_tail)
    return CoreDecomposition(tuple(word), w, core, tuple(tail))


@dataclass
class CoreAutomaton:
    """The core of a graph as a partial automaton with all states accepting.

    ``states[i]`` is the graph vertex of local state i; ``delta[x][i]`` is the
    local successor under signed letter x, or -1 (transitions leaving the
    core count as missing). The language read from state i is the set of
    words labeling paths in the core from that vertex.
    """

    graph: StallingsGraph
    states: List[int]
    start: int
    delta: Dict[int, List[int]]
    local: Dict[int, int] = field(repr=False)

    def __len__(self):
        return len(self.states)

    def letters(self, i: int) -> List[int]:
        return [x for x, t in self.delta.items() if t[i] >= 0]


def core_automaton(g: StallingsGraph, dec: Optional[CoreDecomposition] = None) -> CoreAutomaton:
    dec = dec or decompose(g)
    states = list(dec.core_vertices)
    pos = [-1] * g.n
    for i, v in enumerate(states):
        pos[v] = i
    whole = not dec.tail_vertices  # then the core is every vertex, in order
    delta = {}
    for k in range(g.rank):
        for x, table in ((k + 1, g.out[k]), (-k - 1, g.inn[k])):
            if whole:
                delta[x] = list(table)
            else:
                delta[x] = [pos[t] if t >= 0 else -1 for t in map(table.__getitem__, states)]
    local = dict(zip(states, range(len(states))))
    return CoreAutomaton(g, states, pos[dec.core_entry], delta, local)


# -- morphisms ---------------------------------------------------------------

@dataclass(frozen=True)
class GraphMorphism:
    source: StallingsGraph
    target: StallingsGraph
    map: Tuple[int, ...]


def homomorphism(h: StallingsGraph, g: StallingsGraph) -> Optional[GraphMorphism]:
    """The unique based label-preserving map h -> g, or None if H is not in G."""
    phi = [-1] * h.n
    phi[0] = 0
    stack = [0]
    while stack:
        v = stack.pop()
        pv = phi[v]
        for x in h.letters_at(v):
            t = g.step(pv, x)
            if t < 0:
                return None
            w = h.step(v, x)
            if phi[w] < 0:
                phi[w] = t
                stack.append(w)
            elif phi[w] != t:
                return None
    return GraphMorphism(h, g, tuple(phi))


def is_fi_extension(h: StallingsGraph, g: StallingsGraph) -> Optional[int]:
    """Index of H in G when G is a finite-index extension of H, else None."""
    phi = homomorphism(h, g)
    if phi is None:
        return None
    dh, dg = decompose(h), decompose(g)
    if dh.tail_word != dg.tail_word:
        return None
    core_h = set(dh.core_vertices)
    core_g = set(dg.core_vertices)
    fiber = dict.fromkeys(core_g, 0)
    for p in core_h:
        q = phi.map[p]
        if q not in core_g:
            return None
        fiber[q] += 1
        for x in g.letters_at(q):
            if g.step(q, x) in core_g:
                s = h.step(p, x)
                if s < 0 or s not in core_h:
                    return None
    sizes = set(fiber.values())
    if len(sizes) != 1 or 0 in sizes:
        return None
    return sizes.pop()


# -- subgroup operations -----------------------------------------------------

def spanning_tree_words(g: StallingsGraph) -> List[Word]:
    """Reduced labels of BFS-tree paths from the basepoint to each vertex."""
    words: List[Optional[Word]] = [None] * g.n
    words[0] = ()
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for x in g.letters_at(v):
            w = g.step(v, x)
            if words[w] is None:
                words[w] = words[v] + (x,)
                queue.append(w)
    return words


def schreier_generators(g: StallingsGraph) -> List[Word]:
    """A free basis of the subgroup read off a spanning tree."""
    tree = spanning_tree_words(g)
    tree_edges = set()
    for v in range(1, g.n):
        x = tree[v][-1]
        u = g.step(v, -x)
        tree_edges.add((u, x) if x > 0 else (v, -x))
    gens = []
    for p, k, q in g.edges():
        if (p, k) not in tree_edges:
            gens.append(concat_reduced(concat_reduced(tree[p], (k,)), invert(tree[q])))
    return gens


def conjugate(h: StallingsGraph, g: Sequence[int]) -> StallingsGraph:
    """The graph of g^-1 H g."""
    g = reduce(g)
    gi = invert(g)
    gens = [concat_reduced(concat_reduced(gi, w), g) for w in schreier_generators(h)]
    return build_graph(h.rank, gens)


def _disjoint_union(h: StallingsGraph, k: StallingsGraph):
    edges = list(h.edges()) + [(p + h.n, x, q + h.n) for p, x, q in k.edges()]
    return h.n + k.n, edges


def join(h: StallingsGraph, k: StallingsGraph) -> StallingsGraph:
    """The graph of the subgroup generated by H and K."""
    _same_rank(h, k)
    n, edges = _disjoint_union(h, k)
    return fold(h.rank, n, edges, identify=[(0, h.n)])


def intersect(h: StallingsGraph, k: StallingsGraph) -> StallingsGraph:
    """The graph of H and K's intersection: basepoint component of the product."""
    _same_rank(h, k)
    index = {(0, 0): 0}
    pairs = [(0, 0)]
    edges = []
    i = 0
    while i < len(pairs):
        p, q = pairs[i]
        for x in h.letters_at(p):
            t = k.step(q, x)
            if t < 0:
                continue
            nxt = (h.step(p, x), t)
            j = index.get(nxt)
            if j is None:
                j = index[nxt] = len(pairs)
                pairs.append(nxt)
            if x > 0:
                edges.append((i, x, j))
        i += 1
    out = [[-1] * len(pairs) for _ in range(h.rank)]
    inn = [[-1] * len(pairs) for _ in range(h.rank)]
    for p, x, q in edges:
        out[x - 1][p] = q
        inn[x - 1][q] = p
    return _finalize(h.rank, len(pairs), out, inn, 0, prune=True)[0]


def _same_rank(h, k):
    if h.rank != k.rank:
        raise ValueError(f"graphs over different bases (rank {h.rank} vs {k.rank})")


def index_r_subgroup(h: StallingsGraph, r: int) -> StallingsGraph:
    """A subgroup of index ``r`` in H, from an r-fold cyclic cover of its graph.

    Edges climb one level per step; when the levels of the basepoint
    component do not all connect (loop labels share a factor with r), only
    one non-tree edge climbs instead.
    """
    if r < 1:
        raise ValueError("index must be positive")
    if h.is_trivial():
        raise ValueError("the trivial subgroup has no proper finite-index subgroups")
    edges = list(h.edges())
    g, newid = _layered(h, r, edges, lambda e: 1)
    if sum(1 for v in newid if v >= 0) != r * h.n:
        tree = spanning_tree_words(h)
        tree_edges = set()
        for v in range(1, h.n):
            x = tree[v][-1]
            u = h.step(v, -x)
            tree_edges.add((u, x) if x > 0 else (v, -x))
        climb = next(e for e in edges if (e[0], e[1]) not in tree_edges)
        g, newid = _layered(h, r, edges, lambda e: 1 if e == climb else 0)
    return _finalize(g.rank, g.n, g.out, g.inn, 0, prune=True)[0]


def _layered(h, r, edges, shift):
    n = h.n * r
    out = [[-1] * n for _ in range(h.rank)]
    inn = [[-1] * n for _ in range(h.rank)]
    for e in edges:
        p, k, q = e
        s = shift(e)
        for i in range(r):
            a, b = p * r + i, q * r + (i + s) % r
            out[k - 1][a] = b
            inn[k - 1][b] = a
    return _finalize(h.rank, n, out, inn, 0, prune=False)


class StepKind(enum.Enum):
    NOOP = "noop"
    RE = "re-step"
    I = "i-step"  # noqa: E741


@dataclass(frozen=True)
class Step:
    kind: StepKind
    p: Optional[int] = None
    q: Optional[int] = None
    word: Word = ()

    def __str__(self):
        if self.kind is StepKind.NOOP:
            return "noop"
        if self.kind is StepKind.I:
            return f"i-step {self.p}={self.q}"
        from .words import format_word
        return f"re-step {self.p} {format_word(self.word)} {self.q}"


def add_generator(h: StallingsGraph, g: Sequence[int]) -> Tuple[StallingsGraph, Step]:
    """Add one generator to H and classify the move as no-op, re-step or i-step."""
    g = reduce(g)
    i, p = 0, 0
    while i < len(g):
        t = h.step(p, g[i])
        if t < 0:
            break
        p, i = t, i + 1
    if i == len(g) and p == 0:
        return h, Step(StepKind.NOOP)
    gi = invert(g)
    j, q = 0, 0
    while j < len(g):
        t = h.step(q, gi[j])
        if t < 0:
            break
        q, j = t, j + 1
    edges = list(h.edges())
    if i + j >= len(g):
        p = path_read(h, 0, g[: len(g) - j])
        graph = fold(h.rank, h.n, edges, identify=[(p, q)])
        return graph, Step(StepKind.I, min(p, q), max(p, q))
    w = g[i : len(g) - j]
    path = [p] + list(range(h.n, h.n + len(w) - 1)) + [q]
    for s, x in enumerate(w):
        edges.append((path[s], x, path[s + 1]) if x > 0 else (path[s + 1], -x, path[s]))
    graph = fold(h.rank, h.n + len(w) - 1, edges)
    return graph, Step(StepKind.RE, p, q, tuple(w))


# -- canonical text -----------------------------------------------------------

def canonicalize(g: StallingsGraph) -> StallingsGraph:
    if g.canonical:
        return g
    return _finalize(g.rank, g.n, g.out, g.inn, 0, prune=False)[0]


def canonical_form(g: StallingsGraph) -> str:
    """Edge-list text of the BFS-renumbered graph; equal iff same subgroup."""
    g = canonicalize(g)
    lines = [f"vertices: {g.n}", "base: 0"]
    lines += [f"{p} {letter_name(k)} {q}" for p, k, q in sorted(g.edges())]
    return "\n".join(lines)
