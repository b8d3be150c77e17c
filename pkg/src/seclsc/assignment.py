"""Problem parameters, data assignments, chains and the min-max converse search.

Servers and datasets are 1-based in every public structure, matching how
instances are usually written down; internally bitmasks use bit ``k - 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import UnsupportedParameters, UsageError
from .field import DEFAULT_Q, PrimeField

EXACT_CHAIN_LIMIT = 14
ENUM_MAX_N = 8
ENUM_MAX_M = 5


def wrap(b: int, a: int) -> int:
    """Remainder in 1..a (a itself when a divides b)."""
    r = b % a
    return a if r == 0 else r


@dataclass(frozen=True)
class ProblemParams:
    K: int
    N: int
    N_r: int
    q: int = DEFAULT_Q
    seed: int = 42

    def __post_init__(self):
        if self.N < 1 or self.K < 1:
            raise UsageError("K and N must be positive")
        if self.K % self.N:
            raise UsageError(f"N={self.N} must divide K={self.K}")
        if not 1 <= self.N_r <= self.N:
            raise UsageError(f"need 1 <= N_r <= N, got N_r={self.N_r}, N={self.N}")
        PrimeField(self.q)

    @property
    def M_prime(self) -> int:
        return self.N - self.N_r + 1

    @property
    def M(self) -> int:
        return self.K // self.N * self.M_prime

    @classmethod
    def from_replication(cls, N, M_prime, K=None, **kw):
        return cls(K=N if K is None else K, N=N, N_r=N - M_prime + 1, **kw)

    def to_json(self):
        return {"K": self.K, "N": self.N, "N_r": self.N_r, "M": self.M,
                "M_prime": self.M_prime, "q": self.q, "seed": self.seed}

    @classmethod
    def from_json(cls, d):
        return cls(K=int(d["K"]), N=int(d["N"]), N_r=int(d["N_r"]),
                   q=int(d.get("q", DEFAULT_Q)), seed=int(d.get("seed", 42)))


@dataclass(frozen=True)
class Assignment:
    """Dataset sets Z_1..Z_N over datasets 1..k."""

    k: int
    sets: tuple

    def __post_init__(self):
        sets = tuple(frozenset(int(x) for x in z) for z in self.sets)
        for z in sets:
            if any(not 1 <= x <= self.k for x in z):
                raise UsageError(f"dataset index out of range 1..{self.k}: {sorted(z)}")
        object.__setattr__(self, "sets", sets)

    @property
    def n(self) -> int:
        return len(self.sets)

    def holders(self, k: int):
        return [i + 1 for i, z in enumerate(self.sets) if k in z]

    def masks(self):
        return [sum(1 << (x - 1) for x in z) for z in self.sets]

    def check_regular(self, load: int, replication: int):
        """Raise unless every server holds ``load`` datasets and every dataset
        sits on ``replication`` servers."""
        for i, z in enumerate(self.sets, 1):
            if len(z) != load:
                raise UsageError(f"server {i} holds {len(z)} datasets, expected {load}")
        for k in range(1, self.k + 1):
            c = len(self.holders(k))
            if c != replication:
                raise UsageError(f"dataset {k} on {c} servers, expected {replication}")
        return self

    def expand(self, groups):
        """Replace group indices by the datasets they contain (``groups[i-1]``)."""
        k = sum(len(g) for g in groups)
        return Assignment(k, tuple(frozenset(d for i in z for d in groups[i - 1])
                                   for z in self.sets))

    def to_json(self):
        return {"n": self.n, "k": self.k, "sets": [sorted(z) for z in self.sets]}

    @classmethod
    def from_json(cls, d):
        a = cls(int(d["k"]), tuple(d["sets"]))
        if a.n != int(d["n"]):
            raise UsageError("assignment 'n' does not match number of sets")
        return a


@dataclass(frozen=True)
class ChainCertificate:
    """Servers s_1..s_v, each holding ``witness[i]`` unseen by its predecessors."""

    servers: tuple
    witness: tuple

    def __len__(self):
        return len(self.servers)

    def verify(self, a: Assignment) -> bool:
        if len(set(self.servers)) != len(self.servers) or len(self.witness) != len(self.servers):
            return False
        seen = set()
        for s, w in zip(self.servers, self.witness):
            z = a.sets[s - 1]
            if w not in z or w in seen:
                return False
            seen |= z
        return True


def cyclic_assignment(params: ProblemParams) -> Assignment:
    """Server n holds groups Mod(n), ..., Mod(n + N - N_r), where group i
    collects the datasets k with Mod(k, N) = i."""
    N, Mp = params.N, params.M_prime
    groups = merged_groups(params.K, N)
    sets = tuple(frozenset(wrap(n + j, N) for j in range(Mp)) for n in range(1, N + 1))
    a = Assignment(N, sets).expand(groups)
    return a.check_regular(params.M, Mp)


def fractional_repetition_assignment(params: ProblemParams) -> Assignment:
    """N/M' disjoint blocks of M' servers; block i shares dataset block i."""
    N, K, Mp = params.N, params.K, params.M_prime
    if N % Mp:
        raise UnsupportedParameters(f"M'={Mp} does not divide N={N}")
    nbar = N // Mp
    per = K // nbar
    sets = []
    for i in range(nbar):
        block = frozenset(range(i * per + 1, (i + 1) * per + 1))
        sets.extend([block] * Mp)
    return Assignment(K, tuple(sets)).check_regular(params.M, Mp)


def merged_groups(K: int, N: int):
    """Groups G_1..G_N with G_i = {k : Mod(k, N) = i}."""
    return [tuple(range(i, K + 1, N)) for i in range(1, N + 1)]


# chains


def _chain_from_order(a: Assignment, order) -> ChainCertificate:
    seen, wit = set(), []
    for s in order:
        wit.append(min(a.sets[s - 1] - seen))
        seen |= a.sets[s - 1]
    return ChainCertificate(tuple(order), tuple(wit))


def find_longest_chain(a: Assignment, mode: str = "exact",
                       limit: int = EXACT_CHAIN_LIMIT) -> ChainCertificate:
    """Longest chain (exact) or a maximal chain (greedy).

    Greedy mode starts once from each distinct server set and repeatedly
    appends the server adding the fewest new datasets (lowest index on ties);
    adding little coverage per step leaves the most room for later servers.
    The longest of these runs is returned.
    """
    masks = a.masks()
    n = len(masks)
    if mode == "greedy":
        best_order = []
        for start in range(n):
            if masks[start] in masks[:start] or not masks[start]:
                continue
            order, cov = [start + 1], masks[start]
            while True:
                pick = None
                for i, m in enumerate(masks):
                    new = bin(m & ~cov).count("1")
                    if new and (pick is None or new < pick[0]):
                        pick = (new, i)
                if pick is None:
                    break
                order.append(pick[1] + 1)
                cov |= masks[pick[1]]
            if len(order) > len(best_order):
                best_order = order
        return _chain_from_order(a, best_order)
    if mode != "exact":
        raise UsageError(f"unknown chain mode {mode!r}")
    if n > limit:
        raise UnsupportedParameters(f"exact chain search refuses N={n} > {limit}; use greedy")

    distinct = sorted(set(masks))
    first = {m: masks.index(m) for m in distinct}

    @lru_cache(maxsize=None)
    def best(cov):
        top, arg = 0, None
        for m in distinct:
            if m & ~cov:
                v = 1 + best(cov | m)[0]
                if v > top or (v == top and first[m] < first[arg]):
                    top, arg = v, m
        return top, arg

    order, cov = [], 0
    while True:
        _, m = best(cov)
        if m is None:
            break
        order.append(first[m] + 1)
        cov |= m
    best.cache_clear()
    return _chain_from_order(a, order)


# converse enumeration


def enumerate_assignments(N: int, M_prime: int):
    """Every (N, M')-regular assignment with K = N, one per multiset of server
    sets (so assignments that differ only by server relabeling appear once).

    Server sets are produced in non-decreasing order of their bitmask, which
    is the canonical (sorted) representative of each relabeling class.
    """
    if not (1 <= M_prime <= N):
        raise UsageError("need 1 <= M' <= N")
    if N > ENUM_MAX_N or M_prime > ENUM_MAX_M:
        raise UnsupportedParameters(f"enumeration limited to N<={ENUM_MAX_N}, M'<={ENUM_MAX_M}")
    cands = sorted(sum(1 << j for j in c) for c in itertools.combinations(range(N), M_prime))
    counts = [0] * N
    chosen = []

    def rec(start):
        left = N - len(chosen)
        if left == 0:
            yield Assignment(N, tuple(frozenset(j + 1 for j in range(N) if m >> j & 1)
                                      for m in chosen))
            return
        for ci in range(start, len(cands)):
            m = cands[ci]
            ok = True
            for j in range(N):
                c = counts[j] + (m >> j & 1)
                if c > M_prime or c + left - 1 < M_prime:
                    ok = False
                    break
            if not ok:
                continue
            for j in range(N):
                counts[j] += m >> j & 1
            chosen.append(m)
            yield from rec(ci)
            chosen.pop()
            for j in range(N):
                counts[j] -= m >> j & 1

    yield from rec(0)


def converse_min_max(N: int, M_prime: int, with_witness: bool = False):
    """min over assignments of the longest chain; the randomness size of any
    scheme is at least this value minus one."""
    best, witness = None, None
    for a in enumerate_assignments(N, M_prime):
        v = len(find_longest_chain(a, "exact"))
        if best is None or v < best:
            best, witness = v, a
    return (best, witness) if with_witness else best
