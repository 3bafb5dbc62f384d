"""Reproducible random inputs: subgroup generators and large folded graphs."""

import random
from dataclasses import dataclass
from typing import List

import numpy as np

from .graph import StallingsGraph, _finalize
from .words import Basis, Word, reduce


@dataclass(frozen=True)
class RandomSpec:
    rank: int = 2
    gens: int = 3
    max_len: int = 8
    seed: int = 0


def random_word(rng: random.Random, rank: int, length: int) -> Word:
    """A uniformly random reduced word of the given length."""
    w = []
    while len(w) < length:
        x = rng.randint(1, rank) * rng.choice((1, -1))
        if w and w[-1] == -x:
            continue
        w.append(x)
    return tuple(w)


def random_subgroup(spec: RandomSpec) -> List[Word]:
    Basis(spec.rank)
    rng = random.Random(spec.seed)
    gens = []
    for _ in range(spec.gens):
        gens.append(random_word(rng, spec.rank, rng.randint(1, spec.max_len)))
    return [reduce(w) for w in gens]


def random_graph(n: int, rank: int = 2, seed: int = 0, density: float = 0.9) -> StallingsGraph:
    """Folded graph from random partial permutations, one per generator.

    Each generator is a random permutation of ``n`` points with a fraction
    ``1 - density`` of its arrows deleted. The result is the basepoint
    component with dead ends pruned, so it is usually a bit smaller than n.
    """
    gen = np.random.default_rng(seed)
    out, inn = [], []
    for _ in range(rank):
        perm = gen.permutation(n)
        drop = gen.random(n) >= density
        o = np.where(drop, -1, perm)
        i = np.full(n, -1, dtype=np.int64)
        keep = ~drop
        i[perm[keep]] = np.nonzero(keep)[0]
        out.append(o.tolist())
        inn.append(i.tolist())
    g, _ = _finalize(rank, n, out, inn, 0)
    return g


def hypercube_graph(k: int) -> StallingsGraph:
    """Cayley graph of (Z/2)^k on generators a_1..a_k: the subgroup is the
    kernel of the map sending each generator to a basis vector."""
    n = 2**k
    edges = [(v, i + 1, v ^ (1 << i)) for v in range(n) for i in range(k)]
    return StallingsGraph.from_edges(k, n, edges)
