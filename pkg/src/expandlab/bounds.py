"""Checkers for the inequalities behind the expander theorems.

Exact inequalities (constant 1, no asymptotics) get a PASS/FAIL verdict.  The
``>>`` statements have unspecified implied constants, so for those only the
ratio ``lhs / rhs`` is reported, with the constant taken as 1 and every
logarithm in base 2.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, NamedTuple, Sequence

from .errors import (
    MissingInput,
    PositivityViolation,
    TooLarge,
    TooSmall,
    ZeroInMultiplicativeMode,
)
from .expanders import best_shift_pair, five_var, named_expander, r_set
from .finset import Budget, FiniteSet, affine, format_set, kfold, pairwise
from .numeric import as_rational, format_scalar


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    RATIO_ONLY = "RATIO_ONLY"


EXACT_BOUNDS = ("UNGAR", "RATIO_SUM", "RUZSA_TRIANGLE", "PLUNNECKE")
ASYMPTOTIC_BOUNDS = (
    "MINK", "MINK2", "JONES", "THM1", "THM2", "THM3", "THM4", "FIVE_VAR",
    "GS", "GS1", "GS2", "ENR", "LUND", "LUND2", "JORN",
)
ENR_PRESETS = ("reciprocal", "square")
CSV_FIELDS = ("bound_id", "lhs", "rhs", "ratio", "verdict", "input")


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    lhs_cardinality: int
    rhs_value: object  # Fraction for exact bounds, float for asymptotic ones
    ratio: float
    verdict: Verdict
    inputs_digest: str

    def rhs_text(self) -> str:
        if isinstance(self.rhs_value, Fraction):
            return format_scalar(self.rhs_value)
        return repr(float(self.rhs_value))

    def to_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "lhs_cardinality": self.lhs_cardinality,
            "rhs_value": self.rhs_text(),
            "ratio": self.ratio,
            "verdict": self.verdict.value,
            "inputs_digest": self.inputs_digest,
        }

    def csv_row(self) -> list:
        return [self.bound_id, self.lhs_cardinality, self.rhs_text(), repr(self.ratio),
                self.verdict.value, self.inputs_digest]


def describe(name: str, S: FiniteSet) -> str:
    """Short, stable description of an input set."""
    digest = hashlib.sha1(format_set(S).encode()).hexdigest()[:10]
    if len(S) == 0:
        return f"{name}:n=0"
    return f"{name}:n={len(S)},min={format_scalar(S.min())},max={format_scalar(S.max())},sha1={digest}"


def _need(sets: Mapping[str, FiniteSet], *names):
    missing = [n for n in names if n not in sets]
    if missing:
        raise MissingInput(f"missing input set(s): {', '.join(missing)}")
    return [sets[n] for n in names]


def _digest(sets, names, extra=""):
    parts = [describe(n, sets[n]) for n in names]
    if extra:
        parts.append(extra)
    return ";".join(parts)


def _exact(bound_id, lhs, rhs, holds, digest):
    rhs = Fraction(rhs)
    return BoundReport(bound_id, lhs, rhs, float(Fraction(lhs) / rhs),
                       Verdict.PASS if holds else Verdict.FAIL, digest)


def check_exact(bound_id: str, sets: Mapping[str, FiniteSet], *, k: int = 2, l: int = 2,
                budget: Budget | None = None) -> BoundReport:
    """Verdict for one exact inequality.

    UNGAR           |(A-A)/(A-A)| >= |A|^2 - 2
    RATIO_SUM       |(A+A)/(A+A)| >= 2|A|^2 - 1, A strictly positive
    RUZSA_TRIANGLE  |A-B||C| <= |A-C||B-C|
    PLUNNECKE       |kA - lA| <= |A+A|^(k+l) / |A|^(k+l-1)
    """
    budget = budget or Budget()
    bound_id = bound_id.upper()
    if bound_id == "UNGAR":
        (A,) = _need(sets, "A")
        D = pairwise("-", A, A, budget)
        lhs = len(pairwise("/", D, D, budget))
        rhs = len(A) ** 2 - 2
        return _exact(bound_id, lhs, rhs, lhs >= rhs, _digest(sets, ["A"]))
    if bound_id == "RATIO_SUM":
        (A,) = _need(sets, "A")
        if not A.all_positive():
            raise PositivityViolation("RATIO_SUM needs every element of A strictly positive")
        S = pairwise("+", A, A, budget)
        lhs = len(pairwise("/", S, S, budget))
        rhs = 2 * len(A) ** 2 - 1
        return _exact(bound_id, lhs, rhs, lhs >= rhs, _digest(sets, ["A"]))
    if bound_id == "RUZSA_TRIANGLE":
        A, B, C = _need(sets, "A", "B", "C")
        lhs = len(pairwise("-", A, B, budget)) * len(C)
        rhs = len(pairwise("-", A, C, budget)) * len(pairwise("-", B, C, budget))
        return _exact(bound_id, lhs, rhs, lhs <= rhs, _digest(sets, ["A", "B", "C"]))
    if bound_id == "PLUNNECKE":
        (A,) = _need(sets, "A")
        if k < 0 or l < 0 or k + l < 1:
            raise ValueError("PLUNNECKE needs k, l >= 0 and k + l >= 1")
        if len(A) == 0:
            raise MissingInput("PLUNNECKE needs a nonempty A")
        kA = kfold("+", A, k, budget) if k else FiniteSet([0])
        lA = kfold("+", A, l, budget) if l else FiniteSet([0])
        lhs = len(pairwise("-", kA, lA, budget))
        rhs = Fraction(len(pairwise("+", A, A, budget)) ** (k + l), len(A) ** (k + l - 1))
        return _exact(bound_id, lhs, rhs, lhs <= rhs, _digest(sets, ["A"], f"k={k},l={l}"))
    raise ValueError(f"unknown exact bound {bound_id!r}; choose from {EXACT_BOUNDS}")


def _log2(n: int) -> float:
    return math.log2(n)


def _ratio(bound_id, lhs, rhs, digest):
    return BoundReport(bound_id, lhs, rhs, lhs / rhs, Verdict.RATIO_ONLY, digest)


def _enr_image(X: FiniteSet, f: str) -> FiniteSet:
    if f == "reciprocal":
        if not X.all_positive():
            raise PositivityViolation("the reciprocal preset is used on positive X only")
        return pairwise("/", FiniteSet([1]), X)
    if f == "square":
        return FiniteSet(x * x for x in X)
    raise ValueError(f"unknown convex preset {f!r}; choose from {ENR_PRESETS}")


def report_asymptotic(bound_id: str, sets: Mapping[str, FiniteSet], *, alpha=1,
                      f: str = "reciprocal", budget: Budget | None = None) -> BoundReport:
    """Measured ratio ``lhs / rhs`` for one ``>>`` statement (constant 1).

    Sets used: ``A`` for the single-set bounds; ``X, Y, Z`` for GS and ENR;
    ``X, Y`` for GS2; ``X`` for GS1; ``A, B`` for LUND2.  Each must have at
    least 4 elements so that every log2 factor is at least 2.
    """
    budget = budget or Budget()
    bound_id = bound_id.upper()
    uses = {
        "GS": ["X", "Y", "Z"], "ENR": ["X", "Y", "Z"], "GS2": ["X", "Y"], "GS1": ["X"],
        "LUND2": ["A", "B"],
    }.get(bound_id, ["A"])
    if bound_id not in ASYMPTOTIC_BOUNDS:
        raise ValueError(f"unknown asymptotic bound {bound_id!r}; choose from {ASYMPTOTIC_BOUNDS}")
    inputs = dict(zip(uses, _need(sets, *uses)))
    for name, S in inputs.items():
        if len(S) < 4:
            raise TooSmall(f"{bound_id}: |{name}| = {len(S)} < 4")
    alpha = as_rational(alpha)
    extra = ""
    if bound_id in ("GS", "GS1", "GS2", "JORN"):
        if alpha == 0:
            raise ValueError("the shift alpha must be nonzero")
        extra = f"alpha={format_scalar(alpha)}"
    if bound_id == "ENR":
        extra = f"f={f}"
    digest = _digest(inputs, uses, extra)

    if bound_id in ("GS", "GS1", "GS2", "ENR"):
        X = inputs["X"]
        if bound_id == "GS":
            Y, Z = inputs["Y"], inputs["Z"]
            lhs = len(pairwise("*", X, Y, budget)) * len(pairwise("*", affine(X, 1, alpha), Z, budget))
            rhs = len(X) ** 1.5 * len(Y) ** 0.5 * len(Z) ** 0.5
        elif bound_id == "GS1":
            lhs = len(pairwise("*", X, affine(X, 1, alpha), budget))
            rhs = len(X) ** 1.25
        elif bound_id == "GS2":
            Y = inputs["Y"]
            lhs = max(len(pairwise("*", X, Y, budget)),
                      len(pairwise("*", affine(X, 1, alpha), Y, budget)))
            rhs = len(X) ** 0.75 * len(Y) ** 0.5
        else:
            Y, Z = inputs["Y"], inputs["Z"]
            lhs = len(pairwise("+", _enr_image(X, f), Y, budget)) * len(pairwise("+", X, Z, budget))
            rhs = len(X) ** 1.5 * len(Y) ** 0.5 * len(Z) ** 0.5
        return _ratio(bound_id, lhs, rhs, digest)

    if bound_id == "LUND2":
        A, B = inputs["A"], inputs["B"]
        num = pairwise("+", A, A, budget)
        den = pairwise("+", B, B, budget)
        lhs = len(pairwise("/", num, den, budget))
        quot = len(pairwise("/", A, B, budget))
        rhs = len(A) * len(B) / (_log2(len(A)) + _log2(len(B))) * (len(A) * len(B) / quot) ** 0.125
        return _ratio(bound_id, lhs, rhs, digest)

    A = inputs["A"]
    n = len(A)
    log = _log2(n)
    if bound_id == "MINK":
        D = pairwise("-", A, A, budget)
        lhs, rhs = len(pairwise("*", D, D, budget)), n ** 2 / log
    elif bound_id == "MINK2":
        a, b, lhs = best_shift_pair(A, budget)
        digest += f";a={format_scalar(a)},b={format_scalar(b)}"
        rhs = n ** 2 / log
    elif bound_id == "JONES":
        lhs, rhs = len(r_set(A, budget)), n ** 2 / log
    elif bound_id == "THM1":
        lhs, rhs = len(named_expander("ddd", A, budget)), n ** (17 / 8) / log ** (17 / 16)
    elif bound_id == "THM2":
        lhs, rhs = len(named_expander("ratio-sum", A, budget)), n ** (2 + 2 / 17) / log ** (16 / 17)
    elif bound_id == "THM3":
        AA = len(pairwise("*", A, A, budget))
        lhs, rhs = len(named_expander("aa-sum-ratio", A, budget)), n ** (11 / 8) * AA ** 0.75 / log
    elif bound_id == "THM4":
        lhs, rhs = len(named_expander("aaa-ratio", A, budget)), n ** (17 / 8) / log
    elif bound_id == "FIVE_VAR":
        lhs, rhs = len(five_var(A, budget)), n ** (17 / 8) / log
    elif bound_id == "LUND":
        S = pairwise("+", A, A, budget)
        lhs = len(pairwise("/", S, S, budget))
        rhs = n ** 2 / log * (n ** 2 / len(pairwise("/", A, A, budget))) ** 0.125
    else:  # JORN
        if alpha == 0:
            raise ValueError("the shift alpha must be nonzero")
        lhs = len(pairwise("*", A, affine(A, 1, alpha), budget))
        rhs = n ** (24 / 19) / log ** (2 / 19)
    return _ratio(bound_id, lhs, rhs, digest)


class KatzShenWitness(NamedTuple):
    subset: FiniteSet
    lhs: int
    rhs: Fraction


def katz_shen_witness(X: FiniteSet, B_list: Sequence[FiniteSet], mode: str = "additive") -> KatzShenWitness:
    """Exhaustive search for the best half-size subset in the Katz-Shen lemma.

    Among subsets ``X'`` with ``|X'| >= ceil(|X|/2)`` return one minimising
    ``|X' + B_1 + ... + B_k|`` (products in multiplicative mode), the
    lexicographically smallest on ties, together with
    ``prod |X + B_i| / |X|^(k-1)``.
    """
    if len(X) > 16:
        raise TooLarge(f"|X| = {len(X)} > 16 is beyond exhaustive search")
    if not B_list:
        raise ValueError("need at least one B_i")
    if mode not in ("additive", "multiplicative"):
        raise ValueError("mode is 'additive' or 'multiplicative'")
    op = "+" if mode == "additive" else "*"
    if op == "*" and (0 in X or any(0 in B for B in B_list)):
        raise ZeroInMultiplicativeMode("0 may not appear in X or any B_i")
    if len(X) == 0:
        raise ValueError("X must be nonempty")
    k = len(B_list)
    total = B_list[0]
    for B in B_list[1:]:
        total = pairwise(op, total, B)
    rhs = Fraction(1)
    for B in B_list:
        rhs *= len(pairwise(op, X, B))
    rhs /= len(X) ** (k - 1)

    # one bitmask per x over the values of x op total; |X' op total| is a popcount
    index: dict = {}
    masks = []
    for x in X.elements:
        mask = 0
        for v in pairwise(op, FiniteSet([x]), total).elements:
            mask |= 1 << index.setdefault(v, len(index))
        masks.append(mask)
    n = len(X)
    best = None
    for size in range(-(-n // 2), n + 1):
        for combo in combinations(range(n), size):
            acc = 0
            for i in combo:
                acc |= masks[i]
            key = (acc.bit_count(), combo)
            if best is None or key < best:
                best = key
    count, combo = best
    subset = FiniteSet(X.elements[i] for i in combo)
    return KatzShenWitness(subset, count, rhs)
