"""Time the commensurator on random graphs and fit a log-log slope; also time
the malnormal closure at one size.

    python scripts/scaling_report.py --sizes 1000 10000 100000 1000000
"""

import argparse
import gc
import math
import time
from dataclasses import dataclass, field

import numpy as np

from stallings.fi import commensurator
from stallings.generate import random_graph
from stallings.malnormal import malnormal_closure


@dataclass
class ScalingConfig:
    sizes: list = field(default_factory=lambda: [10**3, 10**4, 10**5, 10**6])
    rank: int = 2
    density: float = 0.9
    repeats: int = 3
    seed: int = 0
    malnormal_size: int = 10**4


def best_time(fn, repeats):
    best = math.inf
    gc.disable()
    try:
        for _ in range(repeats):
            t = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t)
    finally:
        gc.enable()
    return best


def run(cfg: ScalingConfig):
    rows = []
    for n in cfg.sizes:
        g = random_graph(n, cfg.rank, cfg.seed, cfg.density)
        t = best_time(lambda: commensurator(g), cfg.repeats if n < 10**6 else 1)
        rows.append((g.n, t))
        print(f"size: {g.n:>8d}  commensurator: {t:8.3f}s  per-vertex: {1e6 * t / g.n:.2f}us", flush=True)
    x = np.log([r[0] for r in rows])
    y = np.log([r[1] for r in rows])
    if len(rows) >= 2:
        print(f"slope (all sizes): {np.polyfit(x, y, 1)[0]:.3f}")
        print(f"slope (two largest): {(y[-1] - y[-2]) / (x[-1] - x[-2]):.3f}")
    if cfg.malnormal_size:
        g = random_graph(cfg.malnormal_size, cfg.rank, cfg.seed, cfg.density)
        t = time.perf_counter()
        closure, rounds = malnormal_closure(g)
        print(f"malnormal closure: {g.n} vertices -> {closure.n} in {rounds} rounds, "
              f"{time.perf_counter() - t:.1f}s")
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=ScalingConfig().sizes)
    p.add_argument("--density", type=float, default=0.9)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--malnormal-size", type=int, default=10**4)
    a = p.parse_args()
    run(ScalingConfig(a.sizes, 2, a.density, a.repeats, a.seed, a.malnormal_size))


if __name__ == "__main__":
    main()
