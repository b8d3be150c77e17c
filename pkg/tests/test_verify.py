import numpy as np
import pytest

from seclsc.assignment import ProblemParams
from seclsc.errors import IntegrityError, UnsupportedParameters
from seclsc.schemes import (build_combined_scheme, build_cyclic_scheme,
                            build_fractional_repetition_scheme)
from seclsc.verify import (check_chain_consistency, check_decodability, check_security,
                           check_zero_structure, measure_costs, verify_scheme)

from faults import first_missing, inject_coefficient, strip_randomness, zero_server
from oracles import micro_decodable, micro_security


@pytest.fixture(scope="module")
def three():
    return build_cyclic_scheme(ProblemParams(3, 3, 2, q=3), F=[[1, 1, 1], [2, 1, 0]])


def test_zero_structure_three_servers(three):
    ok, viol = check_zero_structure(three)
    assert ok and viol == []
    assert three.rows()[2, 1] == 0  # server 3 lacks W2


def test_zero_structure_detects_injected_fault(three):
    bad = inject_coefficient(three, 3, 2)
    ok, viol = check_zero_structure(bad)
    assert not ok and viol == [(3, 2)]


def test_zero_structure_eight_servers():
    s = build_combined_scheme(ProblemParams(8, 8, 4))
    assert check_zero_structure(s) == (True, [])


def test_decodability_examples(three):
    ok, failing, nfail, mode, checked = check_decodability(three)
    assert ok and checked == 3 and mode == "exhaustive"
    s = build_combined_scheme(ProblemParams(7, 7, 4))
    ok, _, _, _, checked = check_decodability(s)
    assert ok and checked == 35
    s = build_cyclic_scheme(ProblemParams(4, 4, 4))
    assert check_decodability(s)[0] and check_decodability(s)[4] == 1


def test_decodability_failures_are_sorted_and_capped():
    s = zero_server(build_cyclic_scheme(ProblemParams(10, 10, 5)), 1)
    ok, failing, nfail, _, _ = check_decodability(s)
    assert not ok and len(failing) == 20 and nfail > 20
    assert failing == sorted(failing)
    assert all(x[0] == 1 for x in failing)


def test_decodability_modes():
    s = build_fractional_repetition_scheme(ProblemParams(30, 30, 16))
    with pytest.raises(UnsupportedParameters):
        check_decodability(s, "exhaustive")
    ok, _, _, mode, checked = check_decodability(s, "sampled", 500)
    assert ok and mode == "sampled" and checked == 500
    a = check_decodability(s, "sampled", 50, seed=1)
    b = check_decodability(s, "sampled", 50, seed=1)
    assert a == b
    # asking for more samples than subsets falls back to the full list
    small = build_cyclic_scheme(ProblemParams(5, 5, 3))
    assert check_decodability(small, "sampled", 100)[3] == "exhaustive"


def test_security_examples(three):
    ok, d = check_security(three)
    assert ok and d["row_rank"] == 2 and d["q_block_rank"] == 1
    ok, d = check_security(strip_randomness(three))
    assert not ok
    leak = np.array(d["leaked_direction"])
    assert leak.any() and not np.all(leak == leak[0])
    s = build_fractional_repetition_scheme(ProblemParams(4, 4, 3))
    ok, d = check_security(s)
    assert ok and d["row_rank"] == 2 and d["q_block_rank"] == 1


def test_security_requires_sum_to_be_revealed(three):
    # answers that hide everything reveal nothing, but they do not give the sum either
    coeff = three.coeff.copy()
    coeff[0] = 0
    ok, d = check_security(three.with_(coeff=coeff))
    assert not ok and d["leaked_direction"] is None


def test_measure_costs(three):
    assert measure_costs(three) == (2, 1, 2)
    assert measure_costs(build_cyclic_scheme(ProblemParams(4, 4, 1))) == (1, 0, 1)
    assert measure_costs(build_combined_scheme(ProblemParams(8, 8, 4))) == (4, 2, 3)
    with pytest.raises(IntegrityError):
        measure_costs(three.with_(lam=3))


def test_chain_consistency():
    s = build_cyclic_scheme(ProblemParams(5, 5, 4))
    assert check_chain_consistency(s) == (True, 4, "exact")
    s = build_fractional_repetition_scheme(ProblemParams(12, 12, 10))
    assert check_chain_consistency(s) == (True, 4, "exact")
    s = build_combined_scheme(ProblemParams(7, 7, 4))
    assert check_chain_consistency(s) == (True, 3, "exact")
    # a scheme claiming too little randomness for its assignment
    assert not check_chain_consistency(s.with_(randomness_count=1))[0]
    big = build_combined_scheme(ProblemParams(16, 16, 9))
    ok, length, mode = check_chain_consistency(big)
    assert ok and mode == "greedy"


def test_full_report(three):
    r = verify_scheme(three)
    assert r.passed and r.lambda_consistent and r.chain_consistent
    assert (r.q, r.seed) == (3, 42)
    d = r.to_json()
    assert d["passed"] and d["communication_cost"] == 2
    r = verify_scheme(three.with_(lam=5))
    assert not r.lambda_consistent


@pytest.mark.parametrize("q", [3, 5])
def test_rank_verdicts_match_enumeration_on_built_schemes(q):
    for N, nr in [(2, 1), (2, 2), (3, 2)]:
        s = build_cyclic_scheme(ProblemParams(N, N, nr, q=q))
        for spec in (s, strip_randomness(s)):
            rows = spec.rows().tolist()
            assert check_security(spec)[0] == micro_security(rows, q, N, spec.randomness_count)[0]
