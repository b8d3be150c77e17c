# Randomness needed with N = 22 servers as the replication M' grows.
# floor: no scheme can do better than ceil(N/M') - 1.
# optimal: the combined value is known to be the minimum when M'/gcd <= 4.
from seclsc.cli import sweep_rows

print(f"{'M':>3} {'cyclic':>7} {'combined':>9} {'floor':>6}  optimal")
for row in sweep_rows(range(22, 23), range(1, 23)):
    print(f"{row['M_prime']:>3} {row['eta_cyclic']:>7} {row['eta_combined']:>9} "
          f"{row['eta_floor']:>6}  {'yes' if row['optimal_flag'] else ''}")

# the same with M' fixed at 8 and N varying
print(f"\n{'N':>3} {'cyclic':>7} {'combined':>9} {'floor':>6}")
for row in sweep_rows(range(8, 31), range(8, 9)):
    print(f"{row['N']:>3} {row['eta_cyclic']:>7} {row['eta_combined']:>9} {row['eta_floor']:>6}")
