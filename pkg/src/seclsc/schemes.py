"""Scheme construction: cyclic, fractional repetition, the recursive combined
scheme, and the transform that pads a plain linear scheme with randomness.

The combined scheme is built in two stages.  The recursion first produces,
over N merged messages, an assignment and one plain (non-secure) coefficient
row per server.  A basis F of those rows is then taken with the all-ones row
first, each server's row is written in that basis (its vector s_n), and
``securify`` appends the randomness block.
"""

from __future__ import annotations

from math import comb, gcd

import numpy as np

from .assignment import (Assignment, ProblemParams, cyclic_assignment,
                         fractional_repetition_assignment, merged_groups, wrap)
from .errors import ConstructionFailed, ContractViolation, UnsupportedParameters, UsageError
from .field import PrimeField
from .model import SchemeSpec
from .recursion import HRecursionTrace, classify, h_value
from . import verify

RETRY_BUDGET = 32
BUILD_EXHAUSTIVE_LIMIT = 200_000


class _Unlucky(Exception):
    """A random draw produced a degenerate intermediate; redraw."""


def group_and_merge(params: ProblemParams):
    """Groups G_i = {k : Mod(k, N) = i} and the merged message count (N)."""
    g = merged_groups(params.K, params.N)
    return tuple(g), len(g)


def contiguous_groups(K: int, N: int):
    per = K // N
    return tuple(tuple(range(i * per + 1, (i + 1) * per + 1)) for i in range(N))


def securify(F, server_vectors, params: ProblemParams, *, kind: str, grouping,
             assignment: Assignment, trace=None) -> SchemeSpec:
    """Append S = [0; I] to a plain scheme whose first basis row is the sum.

    The answers keep their length, so communication cost is unchanged, and
    lam - 1 randomness symbols are introduced.
    """
    f = PrimeField(params.q)
    F = f.asarray(F, 2)
    lam, m = F.shape
    if lam == 0 or not np.all(F[0] == 1):
        raise ContractViolation("first row of the plain scheme must be all ones")
    S = np.zeros((lam, lam - 1), dtype=np.int64)
    S[1:, :] = np.eye(lam - 1, dtype=np.int64)
    coeff = np.concatenate([F, S], axis=1)
    return SchemeSpec(params=params, kind=kind, grouping=tuple(grouping), assignment=assignment,
                      lam=lam, randomness_count=lam - 1, coeff=coeff,
                      server_vectors=f.asarray(server_vectors, 2),
                      output_lengths=(1,) * params.N, trace=trace)


def basis_with_sum(f: PrimeField, rows):
    """(F, S) with F's first row all ones, F full row rank and rows = S @ F."""
    rows = f.asarray(rows, 2)
    n = rows.shape[1]
    ones = np.ones(n, dtype=np.int64)
    if f.solve_left(rows, ones) is None:
        raise _Unlucky("sum not in span of the transmissions")
    F = ones[None, :]
    rank = 1
    for r in rows:
        cand = np.vstack([F, r])
        if f.rank(cand) > rank:
            F, rank = cand, rank + 1
    S = np.array([f.solve_left(F, r) for r in rows], dtype=np.int64).reshape(len(rows), rank)
    return F, S


# verification inside builders


def _accept(spec: SchemeSpec, expected_lam: int, exhaustive_limit: int) -> bool:
    if spec.lam != expected_lam:
        return False
    if not verify.check_zero_structure(spec)[0]:
        return False
    if spec.field.rank(spec.rows()) != spec.lam:
        return False
    if not verify.check_security(spec)[0]:
        return False
    p = spec.params
    mode = "exhaustive" if comb(p.N, p.N_r) <= exhaustive_limit else "sampled"
    return verify.check_decodability(spec, mode)[0]


def _retry(params, attempt, expected_lam, exhaustive_limit, what):
    rng = np.random.default_rng(params.seed)
    for _ in range(RETRY_BUDGET):
        try:
            spec = attempt(rng)
        except _Unlucky:
            continue
        if _accept(spec, expected_lam, exhaustive_limit):
            return spec
    raise ConstructionFailed(
        f"{what} for N={params.N}, N_r={params.N_r} failed verification {RETRY_BUDGET} times "
        f"over GF({params.q}); try a larger field")


# cyclic


def build_cyclic_scheme(params: ProblemParams, F=None,
                        exhaustive_limit: int = BUILD_EXHAUSTIVE_LIMIT) -> SchemeSpec:
    """Cyclic assignment; F has the all-ones row over N_r - 1 random rows, and
    server n uses the one left-nullspace vector of F's columns it cannot
    compute.  Passing ``F`` fixes the plain matrix instead of sampling it."""
    f = PrimeField(params.q)
    N, N_r = params.N, params.N_r
    grouping, m = group_and_merge(params)
    assignment = cyclic_assignment(params)
    fixed = None if F is None else f.asarray(F, 2)
    if fixed is not None and fixed.shape != (N_r, m):
        raise UsageError(f"F must be {N_r}x{m}")

    def attempt(rng):
        F_ = fixed if fixed is not None else np.vstack(
            [np.ones((1, m), dtype=np.int64), f.sample_matrix(rng, N_r - 1, m)])
        svec = []
        for n in range(1, N + 1):
            held = {wrap(n + j, N) - 1 for j in range(params.M_prime)}
            missing = [i for i in range(m) if i not in held]
            ns = f.left_nullspace(F_[:, missing])
            if ns.shape[0] != 1:
                raise _Unlucky("nullspace not one-dimensional")
            svec.append(ns[0])
        return securify(F_, np.array(svec), params, kind="cyclic", grouping=grouping,
                        assignment=assignment)

    return _retry(params, attempt, N_r, exhaustive_limit, "cyclic scheme")


# fractional repetition


def build_fractional_repetition_scheme(params: ProblemParams,
                                       exhaustive_limit: int = BUILD_EXHAUSTIVE_LIMIT
                                       ) -> SchemeSpec:
    """Blocks of M' servers share one dataset block; block 1 sends Q_1 plus its
    block sum, middle block i sends Q_i - Q_{i-1} plus its sum, the last block
    sends -Q_{last} plus its sum.  Deterministic, no sampling."""
    f = PrimeField(params.q)
    N, K, Mp = params.N, params.K, params.M_prime
    if N % Mp:
        raise UnsupportedParameters(f"M'={Mp} does not divide N={N}")
    nbar = N // Mp
    assignment = fractional_repetition_assignment(params)
    grouping = contiguous_groups(K, N)
    r = nbar - 1
    A = np.zeros((nbar, N + r), dtype=np.int64)
    for i in range(nbar):
        A[i, i * Mp:(i + 1) * Mp] = 1
        if i < r:
            A[i, N + i] = 1
        if i > 0:
            A[i, N + i - 1] = -1
    # basis rows: the total A_1 + ... + A_nbar, then A_2 .. A_nbar
    coeff = np.vstack([A.sum(axis=0), A[1:]]) % f.q
    sv = np.zeros((N, nbar), dtype=np.int64)
    for n in range(N):
        i = n // Mp
        if i == 0:
            sv[n, 0] = 1
            sv[n, 1:] = -1
        else:
            sv[n, i] = 1
    spec = SchemeSpec(params=params, kind="frac-rep", grouping=grouping, assignment=assignment,
                      lam=nbar, randomness_count=r, coeff=coeff, server_vectors=sv % f.q,
                      output_lengths=(1,) * N)
    if not _accept(spec, nbar, exhaustive_limit):
        raise ConstructionFailed(f"fractional repetition over GF({params.q}) failed verification")
    return spec


# combined scheme: stage one


def plain_scheme(N: int, M: int, f: PrimeField, rng):
    """Assignment (0-based message sets) and plain rows for K = N, replication M.

    Returns (sets, rows) where rows[n] is what server n sends, as a vector
    over the N messages.
    """
    rule = classify(N, M)
    if rule == "gcd":
        return _scheme_gcd(N, M, f, rng)
    if rule == "base-rep":
        return [frozenset([n]) for n in range(N)], np.eye(N, dtype=np.int64)
    if rule == "blocks":
        return _scheme_blocks(N, M, f, rng)
    if rule == "reflect":
        return _scheme_reflect(N, M, f, rng)
    if rule == "even":
        return _scheme_even(N, M, f, rng)
    return _scheme_odd(N, M, f, rng)


def _scheme_gcd(N, M, f, rng):
    # g consecutive messages form one super-message, g consecutive servers one group
    g = gcd(N, M)
    inner_sets, inner_rows = plain_scheme(N // g, M // g, f, rng)
    sets, rows = [], np.zeros((N, N), dtype=np.int64)
    for n in range(N):
        u = n // g
        sets.append(frozenset(k for k in range(N) if k // g in inner_sets[u]))
        rows[n] = inner_rows[u][np.arange(N) // g]
    return sets, rows


def _scheme_blocks(N, M, f, rng):
    b = N // M - 1
    off = b * M
    sets, rows = [], np.zeros((N, N), dtype=np.int64)
    for n in range(off):
        blk = range(n // M * M, (n // M + 1) * M)
        sets.append(frozenset(blk))
        rows[n, list(blk)] = 1
    inner_sets, inner_rows = plain_scheme(N - off, M, f, rng)
    for j, (z, r) in enumerate(zip(inner_sets, inner_rows)):
        sets.append(frozenset(off + k for k in z))
        rows[off + j, off:] = r
    return sets, rows


def _scheme_reflect(N, M, f, rng):
    # first N-M messages go to servers 0..M-1; the remaining M messages carry
    # an (M, 2M-N) scheme on servers 0..M-1 and are fully held by servers M..N-1
    d = N - M
    inner_sets, inner_rows = plain_scheme(M, 2 * M - N, f, rng)
    F4, S4 = basis_with_sum(f, inner_rows)
    lam = F4.shape[0]
    F5 = np.ones((lam, d), dtype=np.int64)
    F5[1:] = f.sample_matrix(rng, lam - 1, 1)
    F = np.concatenate([F5, F4], axis=1)
    null5 = f.left_nullspace(F5)
    sets, rows = [], np.zeros((N, N), dtype=np.int64)
    for n in range(M):
        sets.append(frozenset(range(d)) | frozenset(d + k for k in inner_sets[n]))
        rows[n] = f.matmul(S4[n], F)
    for n in range(M, N):
        s = f.matmul(f.sample_matrix(rng, 1, null5.shape[0])[0], null5)
        sets.append(frozenset(range(d, N)))
        rows[n] = f.matmul(s, F)
    return sets, rows


def _scheme_even(N, M, f, rng):
    # y = 2M - N; the inner (N-M, M/2) scheme runs over pairs
    # P_i = W_{y+i} + 2 W_{M+i}
    y = 2 * M - N
    d = N - M
    h2 = M // 2
    sets, rows = [], np.zeros((N, N), dtype=np.int64)
    a1 = np.zeros(N, dtype=np.int64)
    a1[:y] = 2
    a1[y:M] = 1
    a2 = np.zeros(N, dtype=np.int64)
    a2[:y] = -1
    a2[M:] = 1
    for n in range(h2):
        sets.append(frozenset(range(M)))
        rows[n] = a1
    for n in range(h2, M):
        sets.append(frozenset(range(y)) | frozenset(range(M, N)))
        rows[n] = a2
    inner_sets, inner_rows = plain_scheme(d, h2, f, rng)
    for j in range(d):
        sets.append(frozenset(k for i in inner_sets[j] for k in (y + i, M + i)))
        r = np.zeros(N, dtype=np.int64)
        r[y:y + d] = inner_rows[j]
        r[M:] = 2 * inner_rows[j]
        rows[M + j] = r
    return sets, rows % f.q


def _scheme_odd(N, M, f, rng):
    y = 2 * M - N
    d = N - M
    t = (M - 1) // 2
    lam = (M + 5) // 2 - y
    a = f.sample_element(rng, exclude=(0, 1))
    F = np.zeros((lam, N), dtype=np.int64)
    F[0] = 1
    F[1, t:M] = a
    F[1, M:] = 1
    if lam > 2:
        F[2:, M:] = f.sample_matrix(rng, lam - 2, d)
    G = np.vstack([(a * F[0] - F[1]) % f.q, F[2:]])
    tail = F[1:]
    sets, rows = [], np.zeros((N, N), dtype=np.int64)
    for n in range(y):
        sets.append(frozenset(range(M)))
        rows[n] = F[0] - F[1]
    for j in range(1, d + 1):
        held = frozenset(range(t)) | frozenset(M + wrap(j + l - 1, d) - 1 for l in range(1, (M + 3) // 2))
        missing = [c for c in range(N) if c not in held]
        ns = f.left_nullspace(G[:, missing])
        if ns.shape[0] != 2:
            raise _Unlucky("class-two nullspace not two-dimensional")
        s = f.matmul(f.sample_matrix(rng, 1, 2)[0], ns)
        sets.append(held)
        rows[y + j - 1] = f.matmul(s, G)
    for j in range(1, d + 1):
        held = frozenset(range(t, M)) | frozenset(M + wrap(j + l - 1, d) - 1 for l in range(1, t + 1))
        missing = [c for c in range(N) if c not in held]
        ns = f.left_nullspace(tail[:, missing])
        if ns.shape[0] != 1:
            raise _Unlucky("class-three nullspace not one-dimensional")
        sets.append(held)
        rows[M + j - 1] = f.matmul(ns[0], tail)
    return sets, rows % f.q


def build_combined_scheme(params: ProblemParams,
                          exhaustive_limit: int = BUILD_EXHAUSTIVE_LIMIT) -> SchemeSpec:
    """Recursive combined scheme with lam = h(N, M') and lam - 1 randomness."""
    f = PrimeField(params.q)
    N, Mp = params.N, params.M_prime
    trace = h_value(N, Mp)
    grouping, m = group_and_merge(params)

    def attempt(rng):
        sets, rows = plain_scheme(N, Mp, f, rng)
        F, S = basis_with_sum(f, rows)
        assignment = Assignment(N, tuple(frozenset(k + 1 for k in z) for z in sets))
        assignment = assignment.expand(grouping).check_regular(params.M, Mp)
        return securify(F, S, params, kind="combined", grouping=grouping,
                        assignment=assignment, trace=trace)

    return _retry(params, attempt, trace.value, exhaustive_limit, "combined scheme")


BUILDERS = {
    "cyclic": build_cyclic_scheme,
    "frac-rep": build_fractional_repetition_scheme,
    "combined": build_combined_scheme,
}


def build(params: ProblemParams, scheme: str, **kw) -> SchemeSpec:
    try:
        builder = BUILDERS[scheme]
    except KeyError:
        raise UsageError(f"unknown scheme {scheme!r}; choose from {sorted(BUILDERS)}") from None
    return builder(params, **kw)


__all__ = ["group_and_merge", "securify", "build_cyclic_scheme",
           "build_fractional_repetition_scheme", "build_combined_scheme", "build",
           "plain_scheme", "basis_with_sum", "HRecursionTrace", "RETRY_BUDGET"]
