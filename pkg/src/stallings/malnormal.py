"""Malnormality through the fiber square of the core.

Two distinct core vertices p, q read infinitely many common words exactly
when the component of (p, q) in the square of the core contains a cycle.
A subgroup is malnormal when no such pair exists; the malnormal closure
merges all such pairs in rounds until none is left.
"""

from dataclasses import dataclass
from typing import FrozenSet, List, Set, Tuple, Union

import numpy as np

from .graph import CoreAutomaton, StallingsGraph, core_automaton
from .fi import identify_and_fold

# beyond this many product vertices the compiled kernel is used
SQUARE_LIMIT = 250_000


@dataclass
class ProductGraph:
    """The ordered square of a core automaton.

    Pair (r, s) of local states has index ``r * m + s``. Components are
    numbered densely; edge counts are undirected (an edge and its inverse
    count once).
    """

    aut: CoreAutomaton
    component: List[int]
    comp_vertices: List[int]
    comp_edges: List[int]

    @property
    def m(self) -> int:
        return len(self.aut)

    def pair(self, i: int) -> Tuple[int, int]:
        return divmod(i, self.m)

    def step(self, i: int, x: int) -> int:
        r, s = divmod(i, self.m)
        row = self.aut.delta[x]
        a, b = row[r], row[s]
        if a < 0 or b < 0:
            return -1
        return a * self.m + b

    def is_cyclic(self, c: int) -> bool:
        return self.comp_edges[c] >= self.comp_vertices[c]

    def __len__(self):
        return self.m * self.m


def _as_automaton(g: Union[StallingsGraph, CoreAutomaton]) -> CoreAutomaton:
    return g if isinstance(g, CoreAutomaton) else core_automaton(g)


def fiber_square(g: Union[StallingsGraph, CoreAutomaton]) -> ProductGraph:
    aut = _as_automaton(g)
    m = len(aut)
    n = m * m
    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    positive = [row for x, row in aut.delta.items() if x > 0]
    edges = []
    for row in positive:
        for r in range(m):
            a = row[r]
            if a < 0:
                continue
            for s in range(m):
                b = row[s]
                if b >= 0:
                    edges.append((r * m + s, a * m + b))
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    dense = {}
    component = []
    for i in range(n):
        component.append(dense.setdefault(find(i), len(dense)))
    comp_vertices = [0] * len(dense)
    comp_edges = [0] * len(dense)
    for c in component:
        comp_vertices[c] += 1
    for u, _ in edges:
        comp_edges[component[u]] += 1
    return ProductGraph(aut, component, comp_vertices, comp_edges)


def infinite_intersection_pairs(h: StallingsGraph) -> Set[FrozenSet[int]]:
    """Unordered pairs of distinct core vertices with infinite common language."""
    sq = fiber_square(h)
    aut = sq.aut
    pairs = set()
    for i, c in enumerate(sq.component):
        r, s = sq.pair(i)
        if r < s and sq.is_cyclic(c):
            pairs.add(frozenset((aut.states[r], aut.states[s])))
    return pairs


def _square_kernel():
    import numba

    @numba.njit
    def cyclic_offdiagonal_roots(out, m):
        n = m * m
        parent = np.arange(n, dtype=np.int64)
        rank = out.shape[0]
        for k in range(rank):
            for r in range(m):
                a = out[k, r]
                if a < 0:
                    continue
                for s in range(m):
                    b = out[k, s]
                    if b < 0:
                        continue
                    u = r * m + s
                    v = a * m + b
                    while parent[u] != u:
                        parent[u] = parent[parent[u]]
                        u = parent[u]
                    while parent[v] != v:
                        parent[v] = parent[parent[v]]
                        v = parent[v]
                    if u < v:
                        parent[v] = u
                    elif v < u:
                        parent[u] = v
        # vertices minus edges per component, accumulated on the root
        excess = np.zeros(n, dtype=np.int32)
        for i in range(n):
            u = i
            while parent[u] != u:
                u = parent[u]
            parent[i] = u
            excess[u] += 1
        for k in range(rank):
            for r in range(m):
                a = out[k, r]
                if a < 0:
                    continue
                for s in range(m):
                    if out[k, s] >= 0:
                        excess[parent[r * m + s]] -= 1
        count = 0
        for i in range(n):
            if parent[i] == i and excess[i] <= 0 and i // m != i % m:
                count += 1
        roots = np.empty(count, dtype=np.int64)
        j = 0
        for i in range(n):
            if parent[i] == i and excess[i] <= 0 and i // m != i % m:
                roots[j] = i
                j += 1
        return roots

    return cyclic_offdiagonal_roots


_kernel = None


def _cyclic_roots_compiled(aut: CoreAutomaton) -> List[Tuple[int, int]]:
    """One local pair from every off-diagonal component carrying a cycle."""
    global _kernel
    if _kernel is None:
        _kernel = _square_kernel()
    m = len(aut)
    out = np.array([row for x, row in aut.delta.items() if x > 0], dtype=np.int64)
    roots = _kernel(out, m)
    return [divmod(int(i), m) for i in roots]


def _cyclic_roots_python(aut: CoreAutomaton) -> List[Tuple[int, int]]:
    sq = fiber_square(aut)
    seen = set()
    reps = []
    for i, c in enumerate(sq.component):
        r, s = sq.pair(i)
        if r != s and c not in seen and sq.is_cyclic(c):
            seen.add(c)
            reps.append((r, s))
    return reps


def cyclic_representatives(h: StallingsGraph, method: str = "auto") -> List[Tuple[int, int]]:
    """Vertex pairs, one per off-diagonal cyclic component of the square.

    Identifying one pair of a component and folding merges every pair of
    that component, so these pairs stand in for all infinite-intersection
    pairs when folding.
    """
    aut = core_automaton(h)
    if method == "auto":
        method = "compiled" if len(aut) ** 2 > SQUARE_LIMIT else "python"
    if method == "compiled":
        reps = _cyclic_roots_compiled(aut)
    elif method == "python":
        reps = _cyclic_roots_python(aut)
    else:
        raise ValueError(f"unknown method {method!r}")
    return [(aut.states[r], aut.states[s]) for r, s in reps]


def is_malnormal(h: StallingsGraph, method: str = "auto") -> bool:
    return not cyclic_representatives(h, method)


def malnormal_closure_sequence(h: StallingsGraph, method: str = "auto") -> List[StallingsGraph]:
    """The chain H = H_0 < H_1 < ... < H_k ending at the malnormal closure."""
    chain = [h]
    while True:
        g = chain[-1]
        how = method
        if how == "auto":
            how = "compiled" if len(core_automaton(g)) ** 2 > SQUARE_LIMIT else "all-pairs"
        if how == "all-pairs":
            pairs = [tuple(sorted(p)) for p in infinite_intersection_pairs(g)]
        else:
            pairs = cyclic_representatives(g, how)
        if not pairs:
            return chain
        chain.append(identify_and_fold(g, sorted(pairs)))


def malnormal_closure(h: StallingsGraph, method: str = "auto") -> Tuple[StallingsGraph, int]:
    """The least malnormal extension of H and the number of rounds used."""
    chain = malnormal_closure_sequence(h, method)
    return chain[-1], len(chain) - 1
