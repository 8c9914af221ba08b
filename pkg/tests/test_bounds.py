import math
import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from expandlab.bounds import (
    ASYMPTOTIC_BOUNDS, CSV_FIELDS, EXACT_BOUNDS, Verdict, check_exact, katz_shen_witness,
    report_asymptotic,
)
from expandlab.errors import (
    MissingInput, PositivityViolation, TooLarge, TooSmall, ZeroInMultiplicativeMode,
)
from expandlab.finset import FiniteSet, affine

ABC = FiniteSet([1, 2, 3])


def test_exact_examples():
    r = check_exact("UNGAR", {"A": ABC})
    assert (r.lhs_cardinality, r.rhs_value, r.verdict) == (7, 7, Verdict.PASS)
    r = check_exact("RATIO_SUM", {"A": ABC})
    assert (r.lhs_cardinality, r.rhs_value, r.verdict) == (17, 17, Verdict.PASS)
    S = FiniteSet([0, 1])
    r = check_exact("RUZSA_TRIANGLE", {"A": S, "B": S, "C": S})
    assert (r.lhs_cardinality, r.rhs_value, r.verdict) == (6, 9, Verdict.PASS)


def test_exact_lhs_against_oracle():
    A = [1, 2, 5, 7]
    assert check_exact("UNGAR", {"A": FiniteSet(A)}).lhs_cardinality == len(oracles.ungar(oracles.F(A)))
    assert check_exact("RATIO_SUM", {"A": FiniteSet(A)}).lhs_cardinality == len(oracles.ratio_sum(oracles.F(A)))


def test_plunnecke_zero_fold():
    A = FiniteSet([1, 2, 5])
    r = check_exact("PLUNNECKE", {"A": A}, k=1, l=0)
    assert r.lhs_cardinality == 3
    assert r.rhs_value == len(oracles.sumset(oracles.F([1, 2, 5]), oracles.F([1, 2, 5])))
    with pytest.raises(ValueError):
        check_exact("PLUNNECKE", {"A": A}, k=0, l=0)


def test_exact_errors():
    with pytest.raises(MissingInput):
        check_exact("RUZSA_TRIANGLE", {"A": ABC})
    with pytest.raises(PositivityViolation):
        check_exact("RATIO_SUM", {"A": FiniteSet([0, 1, 2])})
    with pytest.raises(ValueError):
        check_exact("NOPE", {"A": ABC})


def test_report_serialization():
    r = check_exact("PLUNNECKE", {"A": ABC})
    row = r.csv_row()
    assert len(row) == len(CSV_FIELDS)
    assert r.to_dict()["verdict"] == "PASS"


rat_sets = st.lists(st.fractions(min_value=-8, max_value=8, max_denominator=3), min_size=1, max_size=5)


@settings(max_examples=40, deadline=None)
@given(rat_sets, rat_sets, rat_sets, st.integers(0, 2), st.integers(0, 2))
def test_exact_bounds_never_fail(a, b, c, k, l):
    sets = {"A": FiniteSet(a), "B": FiniteSet(b), "C": FiniteSet(c)}
    if len(sets["A"]) >= 2:
        assert check_exact("UNGAR", sets).verdict is Verdict.PASS
    assert check_exact("RUZSA_TRIANGLE", sets).verdict is Verdict.PASS
    if k + l >= 1:
        assert check_exact("PLUNNECKE", sets, k=k, l=l).verdict is Verdict.PASS
    pos = FiniteSet(abs(x) + 1 for x in a)
    assert check_exact("RATIO_SUM", {"A": pos}).verdict is Verdict.PASS


def test_asymptotic_examples():
    A = FiniteSet([1, 2, 3, 4])
    r = report_asymptotic("JONES", {"A": A})
    assert r.lhs_cardinality == len(oracles.r_set(oracles.F([1, 2, 3, 4])))
    assert r.rhs_value == 8
    r = report_asymptotic("MINK", {"A": A})
    D = oracles.diffset(oracles.F([1, 2, 3, 4]), oracles.F([1, 2, 3, 4]))
    assert r.lhs_cardinality == len(oracles.prodset(D, D))
    X = FiniteSet([1, 2, 4, 8])
    r = report_asymptotic("GS1", {"X": X}, alpha=1)
    assert r.lhs_cardinality == len(oracles.prodset(oracles.F([1, 2, 4, 8]), oracles.F([2, 3, 5, 9])))
    assert math.isclose(r.rhs_value, 4 ** 1.25)
    assert r.verdict is Verdict.RATIO_ONLY


def test_every_asymptotic_bound_is_positive_and_finite():
    A = FiniteSet([1, 2, 3, 5, 8])
    sets = {name: A for name in "ABXYZ"}
    for bid in ASYMPTOTIC_BOUNDS:
        r = report_asymptotic(bid, sets)
        assert 0 < r.ratio < math.inf, bid


def test_asymptotic_errors():
    with pytest.raises(TooSmall):
        report_asymptotic("THM1", {"A": ABC})
    with pytest.raises(ValueError):
        report_asymptotic("JORN", {"A": FiniteSet([1, 2, 3, 4])}, alpha=0)
    with pytest.raises(PositivityViolation):
        report_asymptotic("ENR", {n: FiniteSet([-1, 2, 3, 4]) for n in "XYZ"})


@pytest.mark.parametrize("bid", ["JONES", "MINK"])
def test_dilation_invariance(bid):
    A = FiniteSet([1, 3, 4, 9, 10])
    cA = affine(A, Fraction(-7, 3), 0)
    assert report_asymptotic(bid, {"A": A}).ratio == report_asymptotic(bid, {"A": cA}).ratio


def test_ungar_dilation_invariance():
    A = FiniteSet([1, 3, 4, 9, 10])
    assert check_exact("UNGAR", {"A": A}).ratio == check_exact("UNGAR", {"A": affine(A, 5, 0)}).ratio


def _ks_oracle(X, Bs, op):
    xs = sorted(X)
    best = None
    for size in range(-(-len(xs) // 2), len(xs) + 1):
        for combo in combinations(range(len(xs)), size):
            acc = {xs[i] for i in combo}
            for B in Bs:
                acc = op(acc, B)
            key = (len(acc), combo)
            if best is None or key < best:
                best = key
    return best[0], {xs[i] for i in best[1]}


def test_katz_shen_examples():
    w = katz_shen_witness(FiniteSet([1, 2]), [FiniteSet([0])])
    assert (w.subset, w.lhs, w.rhs) == (FiniteSet([1]), 1, 2)
    w = katz_shen_witness(FiniteSet([0, 1, 2, 3]), [FiniteSet([0, 1])])
    assert (w.subset, w.lhs, w.rhs) == (FiniteSet([0, 1]), 3, 5)
    w = katz_shen_witness(FiniteSet([1, 2, 4]), [FiniteSet([1, 2])], "multiplicative")
    assert (w.subset, w.lhs, w.rhs) == (FiniteSet([1, 2]), 3, 4)


def test_katz_shen_against_oracle():
    rng = random.Random(11)
    for _ in range(30):
        X = oracles.F(rng.sample(range(1, 30), rng.randint(1, 7)))
        Bs = [oracles.F(rng.sample(range(1, 10), rng.randint(1, 3))) for _ in range(rng.randint(1, 2))]
        for mode, op in (("additive", oracles.sumset), ("multiplicative", oracles.prodset)):
            w = katz_shen_witness(FiniteSet(X), [FiniteSet(B) for B in Bs], mode)
            lhs, subset = _ks_oracle(X, Bs, op)
            assert w.lhs == lhs and set(w.subset.elements) == subset
            assert len(w.subset) >= -(-len(X) // 2)


def test_katz_shen_errors():
    with pytest.raises(TooLarge):
        katz_shen_witness(FiniteSet(range(17)), [FiniteSet([0])])
    with pytest.raises(ZeroInMultiplicativeMode):
        katz_shen_witness(FiniteSet([0, 1]), [FiniteSet([1])], "multiplicative")


def test_bound_id_lists():
    assert EXACT_BOUNDS == ("UNGAR", "RATIO_SUM", "RUZSA_TRIANGLE", "PLUNNECKE")
