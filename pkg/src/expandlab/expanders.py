"""Named expander sets and proof traces.

Shared-variable constructions such as ``R[A] = {(a-b)/(a-c)}`` or the
five-variable set ``{(ab+c)/(ad+e)}`` cannot be written in the expression
language, whose names range independently.  They are built here as a union,
over the shared variable ``a``, of ordinary pairwise operations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import BudgetExceeded, EmptyDenominator, PreconditionViolation
from .finset import Budget, FiniteSet, affine, pairwise, union


class Expander(enum.Enum):
    DDD = "ddd"
    RATIO_SUM_PLUS_RATIO = "ratio-sum"
    AA_SUM_RATIO = "aa-sum-ratio"
    AAA_RATIO = "aaa-ratio"
    FIVE_VAR = "five-var"
    R_TRIPLE = "r-triple"

    @classmethod
    def lookup(cls, name) -> "Expander":
        if isinstance(name, cls):
            return name
        for member in cls:
            if name in (member.value, member.name):
                return member
        raise ValueError(f"unknown expander {name!r}; choose from {[m.value for m in cls]}")


def r_set(A: FiniteSet, budget: Budget | None = None) -> FiniteSet:
    """``R[A] = {(a-b)/(a-c) : a, b, c in A, a != c}``.

    For a fixed ``a`` this is the ratio set of ``A - a``; the triples with
    ``c == a`` are exactly the zero denominators that division skips.
    """
    budget = budget or Budget()
    if len(A) < 2:
        return FiniteSet()
    parts = []
    for a in A:
        shifted = affine(A, 1, -a)
        parts.append(pairwise("/", shifted, shifted, budget))
    out = union(*parts)
    budget.check(len(out))
    return out


def five_var(A: FiniteSet, budget: Budget | None = None) -> FiniteSet:
    """``{(ab+c)/(ad+e)}`` with one ``a`` shared by numerator and denominator."""
    budget = budget or Budget()
    parts = []
    for a in A:
        lin = pairwise("+", affine(A, a, 0) if a else FiniteSet([0]), A, budget)
        if len(lin.nonzero()):
            parts.append(pairwise("/", lin, lin, budget))
    if not parts:
        raise EmptyDenominator("every denominator ad+e is zero")
    out = union(*parts)
    budget.check(len(out))
    return out


def named_expander(name, A: FiniteSet, budget: Budget | None = None) -> FiniteSet:
    """Evaluate a named expander set on ``A``."""
    name = Expander.lookup(name)
    budget = budget or Budget()
    if len(A) == 0:
        raise PreconditionViolation("expanders need a nonempty set")
    if name is Expander.DDD:
        D = pairwise("-", A, A, budget)
        return pairwise("*", pairwise("*", D, D, budget), D, budget)
    if name is Expander.RATIO_SUM_PLUS_RATIO:
        S = pairwise("+", A, A, budget)
        return pairwise("+", pairwise("/", S, S, budget), pairwise("/", A, A, budget), budget)
    if name is Expander.AA_SUM_RATIO:
        AA = pairwise("*", A, A, budget)
        return pairwise("/", pairwise("+", AA, AA, budget), pairwise("+", A, A, budget), budget)
    if name is Expander.AAA_RATIO:
        N = pairwise("+", pairwise("*", A, A, budget), A, budget)
        return pairwise("/", N, N, budget)
    if name is Expander.FIVE_VAR:
        return five_var(A, budget)
    return r_set(A, budget)


def shkredov_check(A: FiniteSet) -> bool:
    """True iff ``R[A] - 1`` and ``-R[A]`` are the same set."""
    if len(A) < 2:
        raise PreconditionViolation("need |A| >= 2")
    R = r_set(A)
    return affine(R, 1, -1) == affine(R, -1, 0)


def best_shift_pair(A: FiniteSet, budget: Budget | None = None):
    """Distinct ``a, b`` in ``A`` maximising ``|(A-a)(A-b)|``.

    Returns ``(a, b, cardinality)``; ties go to the lexicographically
    smallest ``(a, b)``.  The count is symmetric in ``a, b`` so each
    unordered pair is evaluated once.
    """
    if len(A) < 2:
        raise PreconditionViolation("need |A| >= 2")
    budget = budget or Budget()
    shifts = [affine(A, 1, -a) for a in A]
    best = None
    n = len(A)
    for i in range(n):
        for j in range(i + 1, n):
            size = len(pairwise("*", shifts[i], shifts[j], budget))
            if best is None or size > best[2]:
                best = (A.elements[i], A.elements[j], size)
    return best


@dataclass
class GrowthChain:
    kind: str
    sizes: list = field(default_factory=list)
    truncated: bool = False
    reason: str | None = None
    base_size: int = 0
    exponents: list = field(default_factory=list)
    candidates: list = field(default_factory=list)
    ties: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "sizes": [list(s) for s in self.sizes],
            "truncated": self.truncated,
            "reason": self.reason,
        }
        if self.exponents:
            out["exponents"] = [list(e) for e in self.exponents]
        if self.candidates:
            out["candidates"] = [dict(c) for c in self.candidates]
            out["ties"] = list(self.ties)
        return out


def theorem2_chain(A: FiniteSet, k_max: int, budget: Budget | None = None) -> GrowthChain:
    """Sizes of ``X_0 = D/D`` and ``X_i = X_{i-1}R`` or ``X_{i-1}(R-1)``.

    Each step keeps the larger candidate (``X R`` on a tie, recorded in
    ``ties``).  Running out of budget ends the chain with a reason instead
    of raising.
    """
    if len(A) < 2:
        raise PreconditionViolation("need |A| >= 2")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    budget = budget or Budget()
    chain = GrowthChain(kind="theorem2_chain", base_size=len(A))
    try:
        D = pairwise("-", A, A, budget)
        X = pairwise("/", D, D, budget)
    except BudgetExceeded as exc:
        chain.truncated, chain.reason = True, f"X_0: {exc}"
        return chain
    chain.sizes.append((0, len(X)))
    R = r_set(A, budget)
    R1 = affine(R, 1, -1)
    for i in range(1, k_max + 1):
        try:
            via_r = pairwise("*", X, R, budget)
            via_r1 = pairwise("*", X, R1, budget)
        except BudgetExceeded as exc:
            chain.truncated, chain.reason = True, f"step {i}: {exc}"
            break
        tie = len(via_r) == len(via_r1)
        choice = "R-1" if len(via_r1) > len(via_r) else "R"
        if tie:
            chain.ties.append(i)
        chain.candidates.append({"step": i, "XR": len(via_r), "XR_minus_1": len(via_r1), "choice": choice})
        X = via_r1 if choice == "R-1" else via_r
        chain.sizes.append((i, len(X)))
    return chain


def kfold_difference_growth(A: FiniteSet, k_max: int, budget: Budget | None = None) -> GrowthChain:
    """``|(A-A)^(k)|`` for ``k = 1..k_max`` with exponents ``log2|.| / log2|A|``."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    budget = budget or Budget()
    chain = GrowthChain(kind="kfold_difference", base_size=len(A))
    log_a = math.log2(len(A)) if len(A) > 1 else None
    try:
        D = pairwise("-", A, A, budget)
    except BudgetExceeded as exc:
        chain.truncated, chain.reason = True, f"k=1: {exc}"
        return chain
    P = D
    for k in range(1, k_max + 1):
        if k > 1:
            try:
                P = pairwise("*", P, D, budget)
            except BudgetExceeded as exc:
                chain.truncated, chain.reason = True, f"k={k}: {exc}"
                break
        chain.sizes.append((k, len(P)))
        chain.exponents.append((k, math.log2(len(P)) / log_a if log_a else None))
    return chain


def theorem1_trace(A: FiniteSet, budget: Budget | None = None) -> dict:
    """Cardinalities along the chain of inequalities for ``|DDD|``.

    Besides the raw sizes the record carries three exact checks:
    ``R.R`` and ``R.(R-1)`` have equal size, ``R.R`` sits inside
    ``DD/DD``, and the multiplicative Ruzsa step
    ``|DD/DD| |X'| <= |X' DD|^2`` for ``X' = DD`` minus zero.
    """
    if len(A) < 2:
        raise PreconditionViolation("need |A| >= 2")
    budget = budget or Budget()
    D = pairwise("-", A, A, budget)
    DD = pairwise("*", D, D, budget)
    DDD = pairwise("*", DD, D, budget)
    DD_over_DD = pairwise("/", DD, DD, budget)
    R = r_set(A, budget)
    RR = pairwise("*", R, R, budget)
    R_R1 = pairwise("*", R, affine(R, 1, -1), budget)
    X = DD.nonzero()
    XDD = pairwise("*", X, X, budget)
    ruzsa_lhs = len(pairwise("/", X, X, budget)) * len(X)
    return {
        "A_size": len(A),
        "D": len(D),
        "DD": len(DD),
        "DDD": len(DDD),
        "DD_over_DD": len(DD_over_DD),
        "R": len(R),
        "RR": len(RR),
        "R_times_R_minus_1": len(R_R1),
        "RR_equals_R_R_minus_1": len(RR) == len(R_R1),
        "RR_subset_DD_over_DD": RR.issubset(DD_over_DD),
        "shkredov_identity": affine(R, 1, -1) == affine(R, -1, 0),
        "ruzsa_step_lhs": ruzsa_lhs,
        "ruzsa_step_rhs": len(XDD) ** 2,
        "ruzsa_step_holds": ruzsa_lhs <= len(XDD) ** 2,
    }
