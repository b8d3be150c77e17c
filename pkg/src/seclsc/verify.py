"""Exact checks of a SchemeSpec: zero structure, decodability from every
N_r-subset, security of the full answer vector, costs and chain consistency.

Every verdict comes from rank computations over GF(q).
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from math import comb, gcd

import numpy as np

from .assignment import EXACT_CHAIN_LIMIT, find_longest_chain
from .errors import IntegrityError, UnsupportedParameters, UsageError
from .model import SchemeSpec
from .recursion import h

EXHAUSTIVE_LIMIT = 5_000_000
DEFAULT_SAMPLES = 10_000
MAX_REPORTED = 20
_CHUNK = 4096


@dataclass
class VerificationReport:
    q: int
    seed: int
    kind: str
    N: int
    N_r: int
    M_prime: int
    zero_structure_ok: bool = True
    zero_structure_violations: list = field(default_factory=list)
    decodable: bool = True
    subset_mode: str = "exhaustive"
    subsets_checked: int = 0
    failing_subsets: list = field(default_factory=list)
    failure_count: int = 0
    secure: bool = True
    row_rank: int = 0
    q_block_rank: int = 0
    leaked_direction: list | None = None
    security_note: str = ""
    communication_cost: int = 0
    randomness_size: int = 0
    lambda_measured: int = 0
    lambda_consistent: bool = True
    chain_length: int | None = None
    chain_mode: str | None = None
    chain_consistent: bool | None = None

    @property
    def passed(self) -> bool:
        return (self.zero_structure_ok and self.decodable and self.secure
                and self.communication_cost == self.N_r)

    def to_json(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def check_zero_structure(spec: SchemeSpec):
    """(ok, violations) where a violation is (server, merged message), 1-based."""
    rows = spec.rows()
    bad = []
    for n, comp in enumerate(spec.computable()):
        for i in range(spec.m):
            if i not in comp and rows[n, i] != 0:
                bad.append((n + 1, i + 1))
    return not bad, bad


def _subsets(N, r, mode, count, seed):
    total = comb(N, r)
    if mode == "exhaustive" or count >= total:
        if total > EXHAUSTIVE_LIMIT:
            raise UnsupportedParameters(
                f"C({N},{r})={total} subsets exceeds exhaustive limit; use sampled mode")
        return "exhaustive", itertools.combinations(range(N), r), total
    if mode != "sampled":
        raise UsageError(f"unknown subset mode {mode!r}")
    rng = np.random.default_rng(seed)
    seen = set()
    while len(seen) < count:
        seen.add(tuple(sorted(rng.choice(N, size=r, replace=False).tolist())))
    return "sampled", iter(sorted(seen)), count


def check_decodability(spec: SchemeSpec, mode: str = "exhaustive",
                       sample_count: int = DEFAULT_SAMPLES, seed: int | None = None):
    """Return (ok, failing subsets (first 20, 1-based), failure count, mode, checked).

    Rows are rewritten in coordinates of a reduced row-echelon basis of all
    transmissions; the target is decodable from a subset exactly when adding
    its coordinate vector does not raise the subset's rank.
    """
    f = spec.field
    N, r = spec.params.N, spec.params.N_r
    seed = spec.params.seed if seed is None else seed
    used, it, total = _subsets(N, r, mode, sample_count, seed)
    rows = spec.rows()
    basis, piv = f.row_basis(rows)
    t = spec.target()
    ct = t[piv]
    reachable = np.array_equal(f.matmul(ct, basis) if len(piv) else np.zeros_like(t), t)
    coords = rows[:, piv]
    failing, nfail, checked = [], 0, 0
    while True:
        chunk = list(itertools.islice(it, _CHUNK))
        if not chunk:
            break
        checked += len(chunk)
        idx = np.array(chunk, dtype=np.int64)
        if not reachable:
            bad = np.ones(len(chunk), dtype=bool)
        else:
            sub = coords[idx]
            aug = np.concatenate([sub, np.broadcast_to(ct, (len(chunk), 1, len(piv)))], axis=1)
            bad = f.batch_rank(aug) != f.batch_rank(sub)
        nfail += int(bad.sum())
        for j in np.nonzero(bad)[0]:
            if len(failing) < MAX_REPORTED:
                failing.append([int(x) + 1 for x in chunk[j]])
    return nfail == 0, failing, nfail, used, checked


def check_security(spec: SchemeSpec):
    """Return (ok, diagnostic dict).

    With T the stacked transmissions and rho its rank, the answers reveal only
    the sum when the randomness columns of T have rank rho - 1 and the single
    randomness-free direction in the row space is the all-ones message vector.
    """
    f = spec.field
    m = spec.m
    basis, _ = f.row_basis(spec.rows())
    rho = basis.shape[0]
    bq = basis[:, m:]
    qrank = f.rank(bq) if rho else 0
    kernel = f.left_nullspace(bq) if rho else np.zeros((0, 0), dtype=np.int64)
    free = f.matmul(kernel, basis[:, :m]) if kernel.shape[0] else np.zeros((0, m), dtype=np.int64)
    diag = {"row_rank": rho, "q_block_rank": qrank, "leaked_direction": None, "note": ""}

    def is_sum(v):
        return v[0] != 0 and np.all(v == v[0])

    leaks = [v for v in free if not is_sum(v)]
    if leaks:
        v = leaks[0]
        if v[np.nonzero(v)[0][0]] != 1:
            v = v * f.inv(v[np.nonzero(v)[0][0]]) % f.q
        diag["leaked_direction"] = [int(x) for x in v]
        diag["note"] = "a randomness-free combination other than the sum is revealed"
        return False, diag
    if free.shape[0] == 0:
        diag["note"] = "no randomness-free combination; the sum itself is hidden"
        return False, diag
    diag["note"] = "only the sum is revealed"
    return True, diag


def measure_costs(spec: SchemeSpec):
    """(communication cost, randomness size, measured lambda)."""
    N_r = spec.params.N_r
    cost = sum(sorted(spec.output_lengths, reverse=True)[:N_r])
    lam = spec.field.rank(spec.rows())
    if lam != spec.lam:
        raise IntegrityError(f"scheme claims lambda={spec.lam} but transmissions have rank {lam}")
    return cost, spec.randomness_count, lam


def check_chain_consistency(spec: SchemeSpec, exact_limit: int = EXACT_CHAIN_LIMIT):
    """Return (ok, chain length, mode).

    Always requires chain - 1 <= randomness.  When the chain is exact and
    M'/gcd(N, M') <= 4 every assignment has a chain of length at least
    h(N, M'), so that is asserted too; for the combined scheme the two
    conditions together pin the chain to exactly h.
    """
    N, Mp = spec.params.N, spec.params.M_prime
    mode = "exact" if N <= exact_limit else "greedy"
    chain = find_longest_chain(spec.assignment, mode, limit=exact_limit)
    if not chain.verify(spec.assignment):
        raise IntegrityError("chain certificate failed re-verification")
    L = len(chain)
    ok = L - 1 <= spec.randomness_count
    if mode == "exact" and Mp // gcd(N, Mp) <= 4:
        ok = ok and L >= h(N, Mp)
    return ok, L, mode


def verify_scheme(spec: SchemeSpec, mode: str = "auto", sample_count: int = DEFAULT_SAMPLES,
                  chain: bool = True, exact_limit: int = EXACT_CHAIN_LIMIT,
                  exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> VerificationReport:
    p = spec.params
    rep = VerificationReport(q=p.q, seed=p.seed, kind=spec.kind, N=p.N, N_r=p.N_r,
                             M_prime=p.M_prime)
    rep.zero_structure_ok, viol = check_zero_structure(spec)
    rep.zero_structure_violations = [list(v) for v in viol[:MAX_REPORTED]]
    if mode == "auto":
        mode = "exhaustive" if comb(p.N, p.N_r) <= exhaustive_limit else "sampled"
    (rep.decodable, rep.failing_subsets, rep.failure_count,
     rep.subset_mode, rep.subsets_checked) = check_decodability(spec, mode, sample_count)
    rep.secure, diag = check_security(spec)
    rep.row_rank, rep.q_block_rank = diag["row_rank"], diag["q_block_rank"]
    rep.leaked_direction, rep.security_note = diag["leaked_direction"], diag["note"]
    try:
        rep.communication_cost, rep.randomness_size, rep.lambda_measured = measure_costs(spec)
    except IntegrityError:
        rep.communication_cost = sum(sorted(spec.output_lengths, reverse=True)[:p.N_r])
        rep.randomness_size = spec.randomness_count
        rep.lambda_measured = diag["row_rank"]
        rep.lambda_consistent = False
    if chain:
        rep.chain_consistent, rep.chain_length, rep.chain_mode = \
            check_chain_consistency(spec, exact_limit)
    return rep
