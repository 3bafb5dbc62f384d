"""How many finite-index extensions do random subgroups and their covers have?

Prints a histogram of lattice sizes and the share of fi-maximal and malnormal
subgroups.
"""

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from stallings.fi import enumerate_fi_extensions
from stallings.generate import RandomSpec, random_subgroup
from stallings.graph import build_graph, index_r_subgroup
from stallings.malnormal import is_malnormal


@dataclass
class SurveyConfig:
    samples: int = 300
    rank: int = 2
    gens: int = 2
    max_len: int = 8
    cover_index: int = 0  # > 1: survey index-r covers of the samples instead
    seed: int = 0


def survey(cfg: SurveyConfig):
    rng = random.Random(cfg.seed)
    sizes = Counter()
    maximal = malnormal = done = 0
    while done < cfg.samples:
        spec = RandomSpec(cfg.rank, cfg.gens, cfg.max_len, rng.randrange(2**32))
        h = build_graph(cfg.rank, random_subgroup(spec))
        if h.is_trivial():
            continue
        if cfg.cover_index > 1:
            h = index_r_subgroup(h, cfg.cover_index)
        n = len(enumerate_fi_extensions(h))
        sizes[n] += 1
        maximal += n == 1
        malnormal += is_malnormal(h)
        done += 1
    return sizes, maximal, malnormal


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=300)
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--cover-index", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    cfg = SurveyConfig(samples=a.samples, max_len=a.max_len, cover_index=a.cover_index, seed=a.seed)
    sizes, maximal, malnormal = survey(cfg)
    for n in sorted(sizes):
        print(f"extensions: {n:>4}  subgroups: {sizes[n]}")
    print(f"fi-maximal: {maximal / cfg.samples:.2%}  malnormal: {malnormal / cfg.samples:.2%}")


if __name__ == "__main__":
    main()
