# Brute force over every placement (up to relabeling servers) for tiny
# instances: the best placement's longest chain bounds the randomness of any
# scheme from below, and here it meets what the combined scheme achieves.
import time
from math import ceil

from seclsc.assignment import converse_min_max, enumerate_assignments
from seclsc.recursion import h

for N, M in [(3, 2), (4, 3), (5, 2), (5, 3), (5, 4), (6, 4), (7, 4)]:
    t = time.perf_counter()
    count = sum(1 for _ in enumerate_assignments(N, M))
    value, witness = converse_min_max(N, M, with_witness=True)
    print(f"({N},{M}) placements={count:6d} min-max={value} h={h(N, M)} "
          f"floor={ceil(N / M)}  [{time.perf_counter() - t:.1f}s]")
    print("   best:", [sorted(z) for z in witness.sets])
