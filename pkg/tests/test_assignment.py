import itertools
import json
from math import ceil

import pytest
from hypothesis import given, settings, strategies as st

from seclsc.assignment import (Assignment, ChainCertificate, ProblemParams, converse_min_max,
                               cyclic_assignment, enumerate_assignments, find_longest_chain,
                               fractional_repetition_assignment, wrap)
from seclsc.errors import UnsupportedParameters, UsageError

from oracles import count_regular_assignments, longest_chain_bruteforce


def test_wrap_convention():
    assert wrap(6, 3) == 3 and wrap(7, 3) == 1 and wrap(3, 3) == 3


def test_params_validation():
    p = ProblemParams(K=10, N=5, N_r=4)
    assert (p.M_prime, p.M) == (2, 4)
    with pytest.raises(UsageError):
        ProblemParams(K=7, N=5, N_r=4)
    with pytest.raises(UsageError):
        ProblemParams(K=5, N=5, N_r=6)
    with pytest.raises(ValueError):
        ProblemParams(K=5, N=5, N_r=2, q=6)


def test_cyclic_three_servers():
    a = cyclic_assignment(ProblemParams(3, 3, 2))
    assert a.sets == (frozenset({1, 2}), frozenset({2, 3}), frozenset({3, 1}))


def test_cyclic_no_replication_and_grouped():
    a = cyclic_assignment(ProblemParams(4, 4, 4))
    assert a.sets == tuple(frozenset({n}) for n in range(1, 5))
    a = cyclic_assignment(ProblemParams(10, 5, 4))
    assert all(len(z) == 4 for z in a.sets)
    assert all(len(a.holders(k)) == 2 for k in range(1, 11))


def test_fractional_repetition_examples():
    a = fractional_repetition_assignment(ProblemParams(4, 4, 3))
    assert a.sets == (frozenset({1, 2}),) * 2 + (frozenset({3, 4}),) * 2
    a = fractional_repetition_assignment(ProblemParams(5, 5, 5))
    assert a.sets == tuple(frozenset({n}) for n in range(1, 6))
    a = fractional_repetition_assignment(ProblemParams(6, 6, 4))
    assert a.sets == (frozenset({1, 2, 3}),) * 3 + (frozenset({4, 5, 6}),) * 3
    with pytest.raises(UnsupportedParameters):
        fractional_repetition_assignment(ProblemParams(5, 5, 4))


def test_assignment_json_roundtrip():
    a = cyclic_assignment(ProblemParams(6, 3, 2))
    d = a.to_json()
    assert d == {"n": 3, "k": 6, "sets": [[1, 2, 4, 5], [2, 3, 5, 6], [1, 3, 4, 6]]}
    assert Assignment.from_json(json.loads(json.dumps(d))) == a


@pytest.mark.parametrize("N", range(1, 15))
def test_cyclic_chain_equals_nr(N):
    for nr in range(1, N + 1):
        a = cyclic_assignment(ProblemParams(N, N, nr))
        c = find_longest_chain(a, "exact")
        assert len(c) == nr and c.verify(a)


def test_cyclic_descending_order_is_a_chain():
    a = cyclic_assignment(ProblemParams(7, 7, 5))
    order = tuple(range(5, 0, -1))
    seen, wit = set(), []
    for s in order:
        wit.append(min(a.sets[s - 1] - seen))
        seen |= a.sets[s - 1]
    assert ChainCertificate(order, tuple(wit)).verify(a)


@pytest.mark.parametrize("N,M", [(N, M) for N in range(1, 13) for M in range(1, N + 1) if N % M == 0])
def test_fractional_repetition_chain(N, M):
    a = fractional_repetition_assignment(ProblemParams.from_replication(N, M))
    assert len(find_longest_chain(a, "exact")) == N // M


def test_single_block_chain_and_exact_limit():
    a = Assignment(4, (frozenset({1, 2, 3, 4}),) * 4)
    assert len(find_longest_chain(a, "exact")) == 1
    big = cyclic_assignment(ProblemParams(15, 15, 3))
    with pytest.raises(UnsupportedParameters):
        find_longest_chain(big, "exact")
    assert len(find_longest_chain(big, "greedy")) <= 15


def test_certificate_rejects_bad_chain():
    a = cyclic_assignment(ProblemParams(3, 3, 2))
    assert not ChainCertificate((1, 1), (1, 2)).verify(a)
    assert not ChainCertificate((1, 2), (1, 2)).verify(a)


@pytest.mark.parametrize("N,M", [(2, 2), (3, 2), (4, 2), (4, 3), (5, 2), (5, 3), (6, 2)])
def test_enumeration_count_matches_bruteforce(N, M):
    got = list(enumerate_assignments(N, M))
    assert len(got) == count_regular_assignments(N, M)
    keys = {tuple(sorted(tuple(sorted(z)) for z in a.sets)) for a in got}
    assert len(keys) == len(got)
    for a in got:
        a.check_regular(M, M)


def test_enumeration_spot_checks():
    assert len(list(enumerate_assignments(2, 2))) == 1
    pats = {tuple(sorted(tuple(sorted(z)) for z in a.sets)) for a in enumerate_assignments(4, 2)}
    assert ((1, 2), (1, 2), (3, 4), (3, 4)) in pats
    assert ((1, 2), (1, 4), (2, 3), (3, 4)) in pats
    with pytest.raises(UnsupportedParameters):
        next(enumerate_assignments(9, 2))
    with pytest.raises(UnsupportedParameters):
        next(enumerate_assignments(8, 6))


def test_converse_small_values():
    assert converse_min_max(3, 2) == 2
    assert converse_min_max(5, 3) == 3
    for n in range(1, 6):
        assert converse_min_max(n, n) == 1


@pytest.mark.parametrize("N", range(1, 7))
def test_converse_above_floor(N):
    for M in range(1, min(N, 5) + 1):
        assert converse_min_max(N, M) >= ceil(N / M)


def test_greedy_matches_exact_on_grid():
    # every enumerated assignment for N <= 6 plus cyclic and block patterns up to 10
    cases = [a for N in range(1, 7) for M in range(1, min(N, 5) + 1)
             for a in enumerate_assignments(N, M)]
    cases += [cyclic_assignment(ProblemParams(N, N, r)) for N in range(1, 11) for r in range(1, N + 1)]
    cases += [fractional_repetition_assignment(ProblemParams.from_replication(N, M))
              for N in range(1, 11) for M in range(1, N + 1) if N % M == 0]
    for a in cases:
        g = find_longest_chain(a, "greedy")
        e = find_longest_chain(a, "exact")
        assert g.verify(a) and e.verify(a)
        assert len(g) == len(e), a


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.lists(
    st.frozensets(st.integers(1, 6), min_size=1, max_size=4), min_size=n, max_size=n)))
def test_exact_chain_matches_bruteforce(sets):
    a = Assignment(6, tuple(sets))
    c = find_longest_chain(a, "exact")
    assert c.verify(a)
    assert len(c) == longest_chain_bruteforce(list(a.sets))
    assert len(find_longest_chain(a, "greedy")) <= len(c)
