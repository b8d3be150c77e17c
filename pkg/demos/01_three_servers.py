# Three servers, three datasets, any two servers must answer.
# Each server stores two datasets and sends one field symbol; the user adds
# the answers up and gets W1 + W2 + W3 and nothing else.
import itertools

from seclsc.assignment import ProblemParams
from seclsc.cli import format_combination
from seclsc.schemes import build_cyclic_scheme
from seclsc.verify import check_security, verify_scheme

q = 3
params = ProblemParams(K=3, N=3, N_r=2, q=q)
spec = build_cyclic_scheme(params, F=[[1, 1, 1], [2, 1, 0]])
names = ["W1", "W2", "W3", "Q"]

# one shared random symbol Q hides everything but the sum
for n, row in enumerate(spec.rows(), 1):
    print(f"X{n} = {format_combination(row, q, names)}")

# any pair decodes
f = spec.field
for pair in itertools.combinations(range(3), 2):
    u = f.solve_left(spec.rows()[list(pair)], spec.target())
    print(pair, "->", format_combination(u, q, [f"X{i + 1}" for i in pair]))

report = verify_scheme(spec)
print("secure:", report.secure, "| cost:", report.communication_cost,
      "| randomness:", report.randomness_size)

# drop Q and the answers give away more than the sum
coeff = spec.coeff.copy()
coeff[:, 3:] = 0
ok, diag = check_security(spec.with_(coeff=coeff))
print("without Q secure:", ok, "| leaked:",
      format_combination(diag["leaked_direction"], q, names[:3]))
