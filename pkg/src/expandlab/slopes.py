"""Slope decomposition of A x A and the cluster argument for (AA+A)/(AA+A).

Points of ``A x A`` are grouped by the line through the origin they lie on.
Lines of similar richness are picked out dyadically, split into clusters of
``2M`` consecutive slopes, and random representatives are drawn so that sums
of points from two lines produce many distinct slopes.  Everything is exact:
slopes are Fractions, and the two places Euler's number enters use rigorous
rational enclosures of e.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import NonPositiveElement, PreconditionViolation
from .expanders import named_expander
from .finset import Budget, FiniteSet
from .numeric import as_rational


@dataclass(frozen=True)
class SlopeDecomposition:
    lines: dict  # slope -> FiniteSet of x-coordinates, ascending by slope
    total_mass: int
    a_size: int

    @property
    def ratio_set_size(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class DyadicSelection:
    tau: Fraction
    S_tau: tuple
    mass: int
    bucket: int
    base: Fraction
    bucket_masses: tuple
    excluded_mass: int  # points on lines richer than the top bucket


@dataclass(frozen=True)
class LLLParams:
    n: int
    d: int
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if self.n < 1 or self.d < 0 or not 0 <= self.p <= 1:
            raise ValueError(f"invalid local lemma parameters n={self.n}, d={self.d}, p={self.p}")


@dataclass
class ClusterPlan:
    M: int
    clusters: list  # (T_t, U_t) slope tuples
    representatives: dict  # slope -> fixed element of its line
    B: Fraction


class RichPairCount(NamedTuple):
    count: int
    ps_bound: Fraction


# ---------------------------------------------------------------- Euler's number


def euler_bounds(terms: int) -> tuple[Fraction, Fraction]:
    """Rational ``lo < e < hi`` from the first ``terms`` series terms."""
    s, fact = Fraction(0), 1
    for k in range(terms):
        if k:
            fact *= k
        s += Fraction(1, fact)
    # tail after 1/(terms-1)! is below 1/((terms-1)! (terms-1))
    last = terms - 1
    return s, s + Fraction(1, fact * last)


def _enclosures():
    yield Fraction(2718281, 10**6), Fraction(2718282, 10**6)
    terms = 16
    while True:
        yield euler_bounds(terms)
        terms *= 2


def _iroot8(x: int) -> int:
    return math.isqrt(math.isqrt(math.isqrt(x)))


def choose_M(tau, n: int, C=1) -> int:
    """``floor((tau^2 / (30 e C n))^(1/8))`` computed exactly."""
    tau, C = as_rational(tau), as_rational(C)
    if tau <= 0 or n < 1 or C <= 0:
        raise ValueError("need tau > 0, n >= 1, C > 0")
    for lo, hi in _enclosures():
        # the radicand decreases in e
        small = tau * tau / (30 * hi * C * n)
        large = tau * tau / (30 * lo * C * n)
        m_small = _iroot8(small.numerator // small.denominator)
        m_large = _iroot8(large.numerator // large.denominator)
        if m_small == m_large:
            return m_small


def lll_feasible(params: LLLParams) -> bool:
    """Local lemma condition ``e p (d+1) <= 1``, decided rigorously."""
    weight = params.p * (params.d + 1)
    if weight == 0:
        return True
    for lo, hi in _enclosures():
        if hi * weight <= 1:
            return True
        if lo * weight > 1:
            return False


def probcond_p(tau, a_size: int, B, C=1) -> Fraction:
    """Unclamped ``(C/tau^2)(|A|^4/B^3 + |A|^2/B)``; may exceed 1."""
    tau, B, C = as_rational(tau), as_rational(B), as_rational(C)
    return C / tau**2 * (Fraction(a_size) ** 4 / B**3 + Fraction(a_size) ** 2 / B)


def probcond_params(tau, a_size: int, M: int, B, C=1) -> LLLParams:
    """Local lemma parameters for the bad events ``E >= B`` of one cluster.

    A probability bound above 1 is clamped; the verdict is then false anyway.
    """
    p = probcond_p(tau, a_size, B, C)
    return LLLParams(n=M**4 - M**2, d=2 * M**2, p=min(p, Fraction(1)))


# ---------------------------------------------------------------- decomposition


def _require_positive(A: FiniteSet):
    if len(A) == 0 or not A.all_positive():
        raise NonPositiveElement("slope machinery needs a nonempty set of positive numbers")


def line(A: FiniteSet, slope) -> FiniteSet:
    """``A_slope = {x in A : slope * x in A}``."""
    slope = as_rational(slope)
    members = set(A.elements)
    return FiniteSet(x for x in A.elements if slope * x in members)


def decompose(A: FiniteSet) -> SlopeDecomposition:
    _require_positive(A)
    groups: dict = {}
    for x in A.elements:
        for y in A.elements:
            groups.setdefault(y / x, []).append(x)
    lines = {lam: FiniteSet(xs) for lam, xs in sorted(groups.items())}
    mass = sum(len(s) for s in lines.values())
    return SlopeDecomposition(lines=lines, total_mass=mass, a_size=len(A))


def dyadic_select(dec: SlopeDecomposition) -> DyadicSelection:
    """Richest dyadic bucket of lines ``[2^(j-1) b, 2^j b)``, ``b = |A|^2 / (2|A/A|)``.

    Buckets run over ``j = 1..ceil(log2 |A|)``; ties go to the smallest j.
    """
    n = dec.a_size
    base = Fraction(n * n, 2 * dec.ratio_set_size)
    sizes = {lam: len(s) for lam, s in dec.lines.items()}
    if n == 1:
        (lam,) = sizes
        return DyadicSelection(Fraction(1), (lam,), 1, 1, base, (1,), 0)
    top = (n - 1).bit_length()  # ceil(log2 n)
    masses = []
    for j in range(1, top + 1):
        lo, hi = base * 2 ** (j - 1), base * 2**j
        masses.append(sum(v for v in sizes.values() if lo <= v < hi))
    j = max(range(top), key=lambda i: (masses[i], -i)) + 1
    lo, hi = base * 2 ** (j - 1), base * 2**j
    S = tuple(lam for lam, v in sizes.items() if lo <= v < hi)
    excluded = sum(v for v in sizes.values() if v >= base * 2**top)
    return DyadicSelection(lo, S, masses[j - 1], j, base, tuple(masses), excluded)


# ---------------------------------------------------------------- slopes of sums


def _sum_slope(a, lam_a, b, lam_b):
    # slope of (a, lam_a a) + (b, lam_b b)
    return (lam_a * a + lam_b * b) / (a + b)


def slope_chain(A: FiniteSet, lam_i, alpha_i, lam_next, alpha_next) -> list:
    """Slopes of ``(alpha_i, lam_i alpha_i) + (alpha_next x, lam_next alpha_next x)``, x ascending."""
    lam_i, lam_next = as_rational(lam_i), as_rational(lam_next)
    alpha_i, alpha_next = as_rational(alpha_i), as_rational(alpha_next)
    return [_sum_slope(alpha_i, lam_i, alpha_next * x, lam_next) for x in A.elements]


def chain_ok(chain: Sequence, lam_i, lam_next) -> bool:
    """Strictly increasing and strictly inside ``(lam_i, lam_next)``."""
    return (
        all(a < b for a, b in zip(chain, chain[1:]))
        and all(lam_i < s < lam_next for s in chain)
    )


def _check_rep(A_members, lam, a, label):
    if a not in A_members or lam * a not in A_members:
        raise PreconditionViolation(f"{label}={a} is not on the line of slope {lam}")


def incidence_count(A: FiniteSet, lam_i, lam_j, lam_k, lam_l, a_i, a_k, alpha_j, alpha_l) -> int:
    """Number of ``(x, y)`` in ``A x A`` whose two sum-points share a slope.

    The left point is ``(a_i, lam_i a_i) + (alpha_j x, lam_j alpha_j x)`` and
    the right one ``(a_k, lam_k a_k) + (alpha_l y, lam_l alpha_l y)``.
    """
    _require_positive(A)
    lam_i, lam_j, lam_k, lam_l = map(as_rational, (lam_i, lam_j, lam_k, lam_l))
    a_i, a_k, alpha_j, alpha_l = map(as_rational, (a_i, a_k, alpha_j, alpha_l))
    members = set(A.elements)
    _check_rep(members, lam_i, a_i, "a_i")
    _check_rep(members, lam_k, a_k, "a_k")
    _check_rep(members, lam_j, alpha_j, "alpha_j")
    _check_rep(members, lam_l, alpha_l, "alpha_l")
    left = Counter(_sum_slope(a_i, lam_i, alpha_j * x, lam_j) for x in A.elements)
    right = Counter(_sum_slope(a_k, lam_k, alpha_l * y, lam_l) for y in A.elements)
    return sum(c * right[s] for s, c in left.items())


def rich_pair_count(A: FiniteSet, lambdas: Sequence, reps: Sequence, K: int) -> RichPairCount:
    """Pairs ``(a, b)`` in ``A_lam_i x A_lam_k`` whose curve holds ``>= K`` points of ``A x A``.

    ``lambdas`` is ``(lam_i, lam_j, lam_k, lam_l)`` and ``reps`` the fixed
    ``(alpha_j, alpha_l)``.  ``ps_bound`` is the incidence bound
    ``|A|^4/K^3 + |A|^2/K`` with constant 1.
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    lam_i, lam_j, lam_k, lam_l = map(as_rational, lambdas)
    alpha_j, alpha_l = reps
    count = 0
    for a in line(A, lam_i):
        for b in line(A, lam_k):
            if incidence_count(A, lam_i, lam_j, lam_k, lam_l, a, b, alpha_j, alpha_l) >= K:
                count += 1
    n = len(A)
    return RichPairCount(count, Fraction(n**4, K**3) + Fraction(n**2, K))


# ---------------------------------------------------------------- cluster argument


def cluster_plan(dec: SlopeDecomposition, sel: DyadicSelection, M: int, C=1) -> ClusterPlan:
    S = sel.S_tau
    if not 2 <= M <= len(S) / 2:
        raise PreconditionViolation(f"need 2 <= M <= |S_tau|/2, got M={M}, |S_tau|={len(S)}")
    clusters = []
    for t in range(len(S) // (2 * M)):
        f = 2 * M * t
        clusters.append((S[f:f + M], S[f + M:f + 2 * M]))
    reps = {lam: dec.lines[lam].min() for lam in S}
    return ClusterPlan(M=M, clusters=clusters, representatives=reps,
                       B=Fraction(dec.a_size, 2 * M * M))


def _run_cluster(A, dec, plan, T, U, rng):
    M = plan.M
    alpha = plan.representatives
    draws = {}
    for lam_i in T:
        choices = dec.lines[lam_i].elements
        for lam_j in U:
            draws[(lam_i, lam_j)] = choices[rng.randrange(len(choices))]
    keys = [(lam_i, lam_j) for lam_i in T for lam_j in U]
    E = {}
    for (li, lj) in keys:
        for (lk, ll) in keys:
            if (li, lj) == (lk, ll):
                continue
            E[(li, lj, lk, ll)] = incidence_count(
                A, li, lj, lk, ll, draws[(li, lj)], draws[(lk, ll)], alpha[lj], alpha[ll]
            )
    sum_pairs = sum(E.values())
    # the set reading {i,j} != {k,l}; T and U are disjoint so it selects the same quadruples
    sum_sets = sum(v for (li, lj, lk, ll), v in E.items() if {li, lj} != {lk, ll})
    slopes = {
        _sum_slope(draws[(li, lj)], li, alpha[lj] * a, lj)
        for (li, lj) in keys for a in A.elements
    }
    ordered = all(
        chain_ok(slope_chain(A, lam, alpha[lam], nxt, alpha[nxt]), lam, nxt)
        for lam, nxt in zip(T + U, (T + U)[1:])
    )
    e_max = max(E.values()) if E else 0
    return {
        "T": list(T),
        "U": list(U),
        "draws": [[li, lj, a] for (li, lj), a in draws.items()],
        "events": len(E),
        "E_max": e_max,
        "E_sum": sum_pairs,
        "E_sum_set_reading": sum_sets,
        "witness_ok": e_max <= plan.B,
        "r_Q": len(slopes),
        "incex_bound": M * M * len(A) - sum_pairs,
        "ordered_chain_ok": ordered,
        "_slopes": slopes,
    }


def cluster_trace(A: FiniteSet, C=1, seed: int = 0, budget: Budget | None = None, *,
                  M: int | None = None, all_clusters: bool = False,
                  compute_target: bool = False) -> dict:
    """End-to-end run of the cluster argument on a concrete positive set.

    ``M`` overrides the formula value (useful at desk scale, where the formula
    gives ``M < 2``).  When no valid ``M`` is available the trace falls back
    to the basic bound ``|A|(|S_tau| - 1)`` and says why in ``degraded``.
    """
    _require_positive(A)
    if len(A) < 4:
        raise PreconditionViolation("cluster_trace needs |A| >= 4")
    C = as_rational(C)
    budget = budget or Budget()
    n = len(A)
    dec = decompose(A)
    sel = dyadic_select(dec)
    S = sel.S_tau
    tau = sel.tau
    alpha = {lam: dec.lines[lam].min() for lam in S}
    basic_chain = all(
        chain_ok(slope_chain(A, lam, alpha[lam], nxt, alpha[nxt]), lam, nxt)
        for lam, nxt in zip(S, S[1:])
    )
    M_formula = choose_M(tau, n, C)
    record = {
        "seed": seed,
        "C": C,
        "A_size": n,
        "total_mass": dec.total_mass,
        "ratio_set_size": dec.ratio_set_size,
        "tau": tau,
        "bucket": sel.bucket,
        "S_tau": list(S),
        "S_tau_size": len(S),
        "S_mass": sel.mass,
        "S_mass_floor": Fraction(n * n, 2 * max(1, (n - 1).bit_length())),
        "excluded_mass": sel.excluded_mass,
        "basic_bound": n * (len(S) - 1),
        "basic_chain_ok": basic_chain,
        "taubound_holds": tau**8 >= C**8 * Fraction(n) ** 7,
        "M_formula": M_formula,
        "M": None,
        "B": None,
        "degraded": None,
        "lll_n": None,
        "lll_d": None,
        "lll_p": None,
        "probcond_lhs": None,
        "lll_feasible": None,
        "E_max": None,
        "clusters": [],
        "cluster_count": 0,
        "cluster_bound": None,
        "realized_slopes": None,
        "final_chain": (len(S) * float(tau)) ** 0.25 * n ** (7 / 8) * len(S) ** 0.75,
    }
    M_used = M if M is not None else M_formula
    if M_used > len(S) // 2:
        M_used = len(S) // 2
    reason = None
    if M is not None and not 2 <= M <= len(S) / 2:
        reason = f"requested M={M} outside [2, |S_tau|/2] with |S_tau|={len(S)}"
    elif M_used < 2:
        reason = f"M={M_used} < 2 (formula gives {M_formula}); only the basic bound applies"
    if reason:
        record["degraded"] = reason
        record["final_bound"] = record["basic_bound"]
    else:
        plan = cluster_plan(dec, sel, M_used, C)
        params = probcond_params(tau, n, M_used, plan.B, C)
        p_raw = probcond_p(tau, n, plan.B, C)
        record.update({
            "M": M_used,
            "B": plan.B,
            "lll_n": params.n,
            "lll_d": params.d,
            "lll_p": p_raw,
            # upper enclosure of e p (d+1)
            "probcond_lhs": float(_first_enclosure_hi() * p_raw * (params.d + 1)),
            "lll_feasible": lll_feasible(params),
            "cluster_count": len(plan.clusters),
            "cluster_bound": Fraction(M_used * M_used * n, 2) * len(plan.clusters),
        })
        rng = random.Random(seed)
        chosen = plan.clusters if all_clusters else plan.clusters[:1]
        realized = set()
        for t, (T, U) in enumerate(chosen, 1):
            info = _run_cluster(A, dec, plan, T, U, rng)
            realized |= info.pop("_slopes")
            info["t"] = t
            record["clusters"].append(info)
        record["E_max"] = max(c["E_max"] for c in record["clusters"])
        record["witness_ok"] = all(c["witness_ok"] for c in record["clusters"])
        record["realized_slopes"] = len(realized)
        record["final_bound"] = record["cluster_bound"]
    if compute_target:
        record["target"] = len(named_expander("aaa-ratio", A, budget))
    return record


def _first_enclosure_hi() -> Fraction:
    return next(_enclosures())[1]
