# The combined scheme on (N, M') = (7, 4) and (8, 5).
# M' is how many servers store each dataset; N_r = N - M' + 1 must answer.
# A cyclic placement needs N_r - 1 random symbols; the combined placement
# gets away with h(N, M') - 1.
from seclsc.assignment import ProblemParams, find_longest_chain
from seclsc.recursion import h_value
from seclsc.schemes import build_combined_scheme, build_cyclic_scheme
from seclsc.verify import verify_scheme

for N, M in [(7, 4), (8, 5), (7, 3)]:
    trace = h_value(N, M)
    print(f"\n(N, M') = ({N}, {M})")
    for s in trace.steps:
        print(f"  {s.rule:8s} {s.before} -> {s.after}  (+{s.added})")
    print("  h =", trace.value)

    p = ProblemParams.from_replication(N, M)
    comb = build_combined_scheme(p)
    cyc = build_cyclic_scheme(p)
    for n, z in enumerate(comb.assignment.sets, 1):
        print(f"  server {n}: datasets {sorted(z)}")
    r = verify_scheme(comb)
    print(f"  combined: lambda={comb.lam} randomness={comb.randomness_count} "
          f"secure={r.secure} decodable={r.decodable} ({r.subsets_checked} subsets)")
    print(f"  cyclic:   randomness={cyc.randomness_count}")

    # a chain of servers each bringing a new dataset forces at least
    # (length - 1) random symbols, whatever the encoding
    chain = find_longest_chain(comb.assignment)
    print(f"  longest chain {chain.servers} -> lower bound {len(chain) - 1}")
