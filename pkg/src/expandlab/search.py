"""Canonical set families and searches for sets that minimise an expression."""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateFamily, ParseError, TooLarge
from .expr import SetExpr, evaluate, parse, to_text
from .finset import Budget, FiniteSet, format_set
from .numeric import format_scalar, parse_scalar

MAX_UNIVERSE = 24


class FamilyKind(enum.Enum):
    AP = "ap"
    GP = "gp"
    RANDOM_INT = "rand"
    RANDOM_RAT = "qrand"


@dataclass(frozen=True)
class FamilySpec:
    """A reproducible family of sets.

    ``start`` and ``step`` are the first term and the difference (AP) or
    ratio (GP).  Random kinds draw ``n`` distinct values from ``[lo, hi]``;
    RANDOM_RAT uses denominators up to ``max_den``.
    """

    kind: FamilyKind
    n: int
    start: Fraction = Fraction(0)
    step: Fraction = Fraction(1)
    lo: int = 0
    hi: int = 0
    seed: int | None = None
    max_den: int = 1

    def to_dict(self) -> dict:
        out = {"kind": self.kind.name, "n": self.n}
        if self.kind in (FamilyKind.AP, FamilyKind.GP):
            out["start"] = format_scalar(self.start)
            out["ratio" if self.kind is FamilyKind.GP else "step"] = format_scalar(self.step)
        else:
            out.update(lo=self.lo, hi=self.hi, seed=self.seed)
            if self.kind is FamilyKind.RANDOM_RAT:
                out["max_den"] = self.max_den
        return out


def parse_family(text: str) -> FamilySpec:
    """Parse ``ap:start:step:n``, ``gp:start:ratio:n``, ``rand:n:lo:hi:seed``
    or ``qrand:n:lo:hi:maxden:seed``."""
    parts = text.strip().split(":")
    try:
        kind = FamilyKind(parts[0].lower())
    except ValueError:
        raise ParseError(f"unknown family {parts[0]!r}", 0, [k.value for k in FamilyKind]) from None
    arity = {FamilyKind.AP: 4, FamilyKind.GP: 4, FamilyKind.RANDOM_INT: 5, FamilyKind.RANDOM_RAT: 6}[kind]
    if len(parts) != arity:
        raise ParseError(f"family {kind.value} takes {arity - 1} fields, got {len(parts) - 1}",
                         0, (f"{arity - 1} fields",))
    try:
        if kind in (FamilyKind.AP, FamilyKind.GP):
            return FamilySpec(kind, n=int(parts[3]), start=parse_scalar(parts[1]), step=parse_scalar(parts[2]))
        n, lo, hi = int(parts[1]), int(parts[2]), int(parts[3])
        if kind is FamilyKind.RANDOM_INT:
            return FamilySpec(kind, n=n, lo=lo, hi=hi, seed=int(parts[4]))
        return FamilySpec(kind, n=n, lo=lo, hi=hi, max_den=int(parts[4]), seed=int(parts[5]))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad family field in {text!r}: {exc}", 0, ("integer",)) from None


def generate(spec: FamilySpec) -> FiniteSet:
    if spec.n < 1:
        raise DegenerateFamily(f"n must be >= 1, got {spec.n}")
    if spec.kind is FamilyKind.AP:
        if spec.step == 0:
            raise DegenerateFamily("AP step is 0")
        return FiniteSet(spec.start + i * spec.step for i in range(spec.n))
    if spec.kind is FamilyKind.GP:
        if spec.step in (0, 1, -1) or spec.start == 0:
            raise DegenerateFamily(f"GP start {spec.start} and ratio {spec.step} do not give n distinct terms")
        return FiniteSet(spec.start * spec.step**i for i in range(spec.n))
    if spec.seed is None:
        raise DegenerateFamily("random families need a seed")
    if spec.hi < spec.lo:
        raise DegenerateFamily(f"empty range [{spec.lo}, {spec.hi}]")
    rng = random.Random(spec.seed)
    if spec.kind is FamilyKind.RANDOM_INT:
        if spec.n > spec.hi - spec.lo + 1:
            raise DegenerateFamily(f"cannot draw {spec.n} distinct integers from [{spec.lo}, {spec.hi}]")
        return FiniteSet(rng.sample(range(spec.lo, spec.hi + 1), spec.n))
    if spec.max_den < 1:
        raise DegenerateFamily("max_den must be >= 1")
    pool = sorted({Fraction(p, q) for q in range(1, spec.max_den + 1)
                   for p in range(spec.lo * q, spec.hi * q + 1)})
    if spec.n > len(pool):
        raise DegenerateFamily(f"only {len(pool)} rationals available, asked for {spec.n}")
    return FiniteSet(rng.sample(pool, spec.n))


class SearchMethod(enum.Enum):
    EXHAUSTIVE = "exhaustive"
    LOCAL = "local"


@dataclass
class SearchResult:
    best_set: FiniteSet
    objective: int
    evaluations: int
    method: SearchMethod
    seed: int | None = None
    expr: str = ""
    restarts: list = field(default_factory=list)  # (restart index, seed, objective)
    best_restart: int | None = None

    def to_dict(self) -> dict:
        out = {
            "method": self.method.value,
            "expr": self.expr,
            "objective": self.objective,
            "best_set": [format_scalar(v) for v in self.best_set],
            "evaluations": self.evaluations,
            "seed": self.seed,
        }
        if self.method is SearchMethod.LOCAL:
            out["best_restart"] = self.best_restart
            out["restarts"] = [{"index": i, "seed": s, "objective": o} for i, s, o in self.restarts]
        return out


def _as_expr(expr) -> SetExpr:
    return parse(expr) if isinstance(expr, str) else expr


def objective(expr, A: FiniteSet, budget: Budget | None = None) -> int:
    """``|expr|`` with ``A`` bound to the given set."""
    return len(evaluate(_as_expr(expr), {"A": A}, budget))


def exhaustive_min(expr, m: int, universe: FiniteSet, budget: Budget | None = None) -> SearchResult:
    """Minimum of ``|expr(A)|`` over all ``m``-subsets of ``universe``.

    Subsets are visited in lexicographic order and only a strictly smaller
    value replaces the incumbent, so ties go to the lexicographically
    smallest subset.
    """
    node = _as_expr(expr)
    universe = universe if isinstance(universe, FiniteSet) else FiniteSet(universe)
    if len(universe) > MAX_UNIVERSE:
        raise TooLarge(f"universe has {len(universe)} elements, limit is {MAX_UNIVERSE}")
    if not 1 <= m <= len(universe):
        raise TooLarge(f"m={m} must lie in [1, {len(universe)}]")
    budget = budget or Budget()
    best, best_val, evals = None, None, 0
    for combo in itertools.combinations(universe.elements, m):
        val = objective(node, FiniteSet(combo), budget)
        evals += 1
        if best_val is None or val < best_val:
            best, best_val = combo, val
    return SearchResult(FiniteSet(best), best_val, evals, SearchMethod.EXHAUSTIVE, expr=to_text(node))


def _descend(node, m, lo, hi, iters, rng, budget):
    current = rng.sample(range(lo, hi + 1), m)
    value = objective(node, FiniteSet(current), budget)
    evals = 1
    for _ in range(iters):
        idx = rng.randrange(m)
        present = set(current)
        new = rng.randint(lo, hi)
        while new in present:
            new = rng.randint(lo, hi)
        cand = current.copy()
        cand[idx] = new
        cand_val = objective(node, FiniteSet(cand), budget)
        evals += 1
        if cand_val < value:
            current, value = cand, cand_val
    return FiniteSet(current), value, evals


def local_search_min(expr, m: int, lo: int, hi: int, iters: int, restarts: int = 1,
                     seed: int = 0, budget: Budget | None = None) -> SearchResult:
    """Strict-descent hill climbing over ``m``-subsets of the integers in ``[lo, hi]``.

    Each step swaps one element for a random absent integer and keeps the
    swap only if the objective drops.  Restart seeds come from a master
    generator seeded with ``seed``; the best restart wins, ties going to the
    lowest index.
    """
    node = _as_expr(expr)
    if m < 2 or iters < 1 or restarts < 1:
        raise ValueError("need m >= 2, iters >= 1 and restarts >= 1")
    if hi - lo + 1 <= m:
        raise TooLarge(f"range [{lo}, {hi}] leaves no room to move {m} elements")
    budget = budget or Budget()
    master = random.Random(seed)
    seeds = [master.getrandbits(64) for _ in range(restarts)]
    result = SearchResult(FiniteSet(), 0, 0, SearchMethod.LOCAL, seed=seed, expr=to_text(node))
    best_val = None
    for i, s in enumerate(seeds):
        found, val, evals = _descend(node, m, lo, hi, iters, random.Random(s), budget)
        result.evaluations += evals
        result.restarts.append((i, s, val))
        if best_val is None or val < best_val:
            best_val = val
            result.best_set, result.objective, result.best_restart = found, val, i
    return result


def describe_result(result: SearchResult) -> str:
    return f"{result.method.value} {result.expr}: objective {result.objective} at {format_set(result.best_set).strip()}"
