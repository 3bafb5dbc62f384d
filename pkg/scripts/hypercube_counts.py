"""Extension counts of the hypercube kernels against the subspace formula and
the two bounds, for k = 1..K."""

import argparse
import time

from stallings.fi import enumerate_fi_extensions, fi_extension_bound, subspace_count
from stallings.generate import hypercube_graph


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-k", type=int, default=5)
    k_max = p.parse_args().max_k
    print(f"{'k':>2} {'n':>4} {'enumerated':>10} {'subspaces':>10} {'lower':>10} {'upper':>12} {'time':>8}")
    for k in range(1, k_max + 1):
        n = 2**k
        t = time.perf_counter()
        count = len(enumerate_fi_extensions(hypercube_graph(k)))
        dt = time.perf_counter() - t
        lower = 2 ** (k * k / 4)
        upper = fi_extension_bound(n)[1]
        print(f"{k:>2} {n:>4} {count:>10} {subspace_count(k):>10} {lower:>10.1f} {upper:>12} {dt:>7.2f}s")


if __name__ == "__main__":
    main()
