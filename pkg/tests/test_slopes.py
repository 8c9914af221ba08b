import math
import random
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from expandlab.errors import NonPositiveElement, PreconditionViolation
from expandlab.expanders import named_expander
from expandlab.finset import FiniteSet
from expandlab.slopes import (
    LLLParams, chain_ok, choose_M, cluster_trace, decompose, dyadic_select, euler_bounds,
    incidence_count, lll_feasible, probcond_p, probcond_params, rich_pair_count, slope_chain,
)

pos_sets = st.lists(st.fractions(min_value=Fraction(1, 5), max_value=20, max_denominator=5),
                    min_size=1, max_size=9)


def test_decompose_example():
    dec = decompose(FiniteSet([1, 2, 4]))
    assert {k: set(v.elements) for k, v in dec.lines.items()} == {
        1: {1, 2, 4}, 2: {1, 2}, Fraction(1, 2): {2, 4}, 4: {1}, Fraction(1, 4): {4},
    }
    assert dec.total_mass == 9
    assert decompose(FiniteSet([1])).total_mass == 1
    assert sorted(len(v) for v in decompose(FiniteSet([1, 2])).lines.values()) == [1, 1, 2]


def test_decompose_rejects_nonpositive():
    with pytest.raises(NonPositiveElement):
        decompose(FiniteSet([0, 1]))


@settings(max_examples=60, deadline=None)
@given(pos_sets)
def test_decompose_matches_oracle(values):
    A = FiniteSet(values)
    dec = decompose(A)
    assert dec.total_mass == len(A) ** 2
    assert {k: set(v.elements) for k, v in dec.lines.items()} == oracles.slope_lines(set(A.elements))
    assert set(dec.lines) == set((A / A).elements)


def test_dyadic_example():
    sel = dyadic_select(decompose(FiniteSet([1, 2, 4])))
    assert sel.base == Fraction(9, 10)
    assert (sel.bucket, sel.tau, sel.mass) == (2, Fraction(9, 5), 7)
    assert sel.S_tau == (Fraction(1, 2), 1, 2)
    one = dyadic_select(decompose(FiniteSet([1])))
    assert one.S_tau == (1,)


@settings(max_examples=80, deadline=None)
@given(pos_sets.filter(lambda v: len(set(v)) >= 2))
def test_dyadic_invariants(values):
    A = FiniteSet(values)
    n = len(A)
    sel = dyadic_select(decompose(A))
    assert sel.tau >= Fraction(n * n, 2 * len(A / A))
    assert sel.mass >= Fraction(n * n, 2 * math.ceil(math.log2(n)))
    dec = decompose(A)
    for lam in sel.S_tau:
        assert sel.tau <= len(dec.lines[lam]) < 2 * sel.tau
    assert list(sel.S_tau) == sorted(sel.S_tau)


def test_euler_bounds_enclose_e():
    getcontext().prec = 50
    e = Fraction(Decimal(1).exp())  # 50 correct digits
    lo, hi = euler_bounds(20)
    assert lo < e - Fraction(1, 10**45) and e + Fraction(1, 10**45) < hi
    assert hi - lo < Fraction(1, 10**15)


def _choose_M_oracle(tau, n, C):
    getcontext().prec = 60
    e = Decimal(1).exp()
    rad = Decimal(tau.numerator) ** 2 / Decimal(tau.denominator) ** 2 / (30 * e * Decimal(C.numerator) / Decimal(C.denominator) * n)
    m = 0
    while Decimal(m + 1) ** 8 <= rad:
        m += 1
    return m


def test_choose_M_examples():
    assert choose_M(10000, 100, 1) == 3
    assert choose_M(1, 1, 1) == 0


@settings(max_examples=80, deadline=None)
@given(st.fractions(min_value=Fraction(1, 3), max_value=10**7, max_denominator=50),
       st.integers(1, 500), st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4))
def test_choose_M_matches_oracle_and_is_monotone(tau, n, C):
    m = choose_M(tau, n, C)
    assert m == _choose_M_oracle(tau, n, C)
    assert choose_M(2 * tau, n, C) >= m


def test_lll_examples():
    assert lll_feasible(LLLParams(5, 3, 0))
    assert not lll_feasible(LLLParams(1, 0, 1))
    assert lll_feasible(LLLParams(1, 0, Fraction(1, 3)))
    assert not lll_feasible(LLLParams(1, 0, Fraction(10**6, 2718281)))  # just above 1/e
    assert lll_feasible(LLLParams(1, 0, Fraction(10**6, 2718282)))  # just below 1/e
    with pytest.raises(ValueError):
        LLLParams(1, 0, 2)


def test_probcond_instance():
    B = Fraction(50, 8)
    assert probcond_p(100, 50, B) == Fraction(13, 5)
    params = probcond_params(100, 50, 2, B)
    assert (params.n, params.d) == (12, 8)
    assert not lll_feasible(params)


def test_incidence_examples():
    A = FiniteSet([1, 2, 4])
    # identical parameters: the diagonal always matches
    assert incidence_count(A, 1, 2, 1, 2, 1, 1, 1, 1) >= 3
    B = FiniteSet([1, 2])
    assert incidence_count(B, 1, 2, 2, 1, 1, 1, 1, 2) == oracles.incidence(
        oracles.F([1, 2]), 1, 2, 2, 1, 1, 1, 1, 2)
    with pytest.raises(PreconditionViolation):
        incidence_count(B, 1, 2, 1, 2, 3, 1, 1, 1)


def test_incidence_against_oracle():
    rng = random.Random(5)
    for _ in range(40):
        vals = rng.sample(range(1, 13), rng.randint(2, 6))
        A = FiniteSet(vals)
        dec = decompose(A)
        lams = list(dec.lines)
        li, lj, lk, ll = (rng.choice(lams) for _ in range(4))
        reps = [rng.choice(dec.lines[l].elements) for l in (li, lk, lj, ll)]
        got = incidence_count(A, li, lj, lk, ll, *reps)
        assert got == oracles.incidence(set(A.elements), li, lj, lk, ll, *reps)
        assert got <= len(A) ** 2


def test_rich_pair_count():
    A = FiniteSet([1, 2, 3, 4, 6])
    dec = decompose(A)
    lams = (1, 2, Fraction(1, 2), Fraction(3, 2))
    reps = (dec.lines[2].min(), dec.lines[Fraction(3, 2)].min())
    counts = [rich_pair_count(A, lams, reps, K).count for K in range(2, 27)]
    assert counts == sorted(counts, reverse=True)
    assert counts[-1] == 0
    assert counts[0] <= len(dec.lines[1]) * len(dec.lines[Fraction(1, 2)])
    expected = sum(
        1 for a in dec.lines[1] for b in dec.lines[Fraction(1, 2)]
        if oracles.incidence(set(A.elements), 1, 2, Fraction(1, 2), Fraction(3, 2), a, b, *reps) >= 2
    )
    assert counts[0] == expected
    assert rich_pair_count(A, lams, reps, 2).ps_bound == Fraction(625, 8) + Fraction(25, 2)
    with pytest.raises(ValueError):
        rich_pair_count(A, lams, reps, 1)


@settings(max_examples=40, deadline=None)
@given(pos_sets.filter(lambda v: len(set(v)) >= 2))
def test_ordered_slope_chain(values):
    A = FiniteSet(values)
    dec = decompose(A)
    lams = list(dec.lines)
    for lam, nxt in zip(lams, lams[1:]):
        chain = slope_chain(A, lam, dec.lines[lam].min(), nxt, dec.lines[nxt].min())
        assert chain_ok(chain, lam, nxt)


def test_cluster_trace_degrades_at_small_scale():
    t = cluster_trace(FiniteSet([1, 2, 4, 8]))
    assert t["M"] is None and t["degraded"]
    assert t["final_bound"] == t["basic_bound"] == 4 * (t["S_tau_size"] - 1)
    with pytest.raises(PreconditionViolation):
        cluster_trace(FiniteSet([1, 2, 4]))


def test_cluster_trace_ap8_against_target():
    A = FiniteSet(range(1, 9))
    target = len(oracles.aaa_ratio(oracles.F(range(1, 9))))
    t = cluster_trace(A, seed=1, M=2, all_clusters=True, compute_target=True)
    assert t["total_mass"] == 64
    assert t["target"] == target
    assert t["basic_chain_ok"]
    assert t["realized_slopes"] <= target
    assert t["basic_bound"] <= target
    assert t["cluster_count"] == t["S_tau_size"] // 4
    for c in t["clusters"]:
        assert c["ordered_chain_ok"]
        assert c["r_Q"] >= c["incex_bound"]
        assert c["E_sum"] == c["E_sum_set_reading"]
        assert c["witness_ok"] == (c["E_max"] <= t["B"])


def test_cluster_trace_reproducible():
    A = FiniteSet([1, 2, 3, 4, 6, 8, 12, 16, 24])
    one = cluster_trace(A, seed=3, M=2)
    assert one == cluster_trace(A, seed=3, M=2)
    draws = {tuple(map(tuple, c["draws"])) for s in range(6) for c in cluster_trace(A, seed=s, M=2)["clusters"]}
    assert len(draws) > 1


def test_cluster_trace_bad_M_degrades():
    t = cluster_trace(FiniteSet(range(1, 9)), M=100)
    assert t["degraded"] and t["final_bound"] == t["basic_bound"]
