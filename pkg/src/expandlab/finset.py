"""Immutable finite sets of exact rationals and their Minkowski-style operations.

A :class:`FiniteSet` stores its elements as two parallel arrays holding the
reduced numerators and (positive) denominators, sorted by value.  When every
intermediate product of an operation stays below 2**53 the work is done with
vectorised int64 arithmetic; otherwise the operation falls back to Python
integers through :class:`fractions.Fraction`.  Either way the result is exact.

Pairwise operations split the left operand into row blocks.  Each block is
reduced to a duplicate-free run, the runs are merged, and only then is the
result put into numeric order, so the output never depends on how the work
was partitioned or how many threads ran it.
"""

from __future__ import annotations

import math
import operator
import os
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import BudgetExceeded, EmptyDenominator, ParseError, ZeroScale
from .numeric import as_rational, format_scalar, parse_scalar

DEFAULT_MAX_ELEMENTS = 10_000_000
BUDGET_ENV = "EXPANDLAB_BUDGET"

# int64 values below this convert to float64 exactly, and correctly rounded
# division of exact operands is monotone, which the ordering step relies on.
_FLOAT_EXACT = 1 << 53
_INT64_STORE = 1 << 62
_CHUNK_PAIRS = 1 << 21
_MERGE_AT = 1 << 23

_OP_ALIASES = {"−": "-", "×": "*", "÷": "/", "x": "*"}
_PY_OPS = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv}

_workers = 1


def set_workers(n: int) -> None:
    """Set the default number of threads used by pairwise evaluation."""
    global _workers
    if n < 1:
        raise ValueError("worker count must be >= 1")
    _workers = int(n)


def get_workers() -> int:
    return _workers


@dataclass(frozen=True)
class Budget:
    """Cap on the number of distinct elements any single result may hold."""

    max_elements: int = DEFAULT_MAX_ELEMENTS

    def __post_init__(self):
        if int(self.max_elements) < 1:
            raise ValueError("max_elements must be >= 1")

    @classmethod
    def from_env(cls, default: int | None = None) -> "Budget":
        raw = os.environ.get(BUDGET_ENV)
        if raw:
            return cls(int(raw))
        return cls(default if default is not None else DEFAULT_MAX_ELEMENTS)

    def check(self, count: int) -> None:
        if count > self.max_elements:
            raise BudgetExceeded(count, self.max_elements)


def _canon_op(op: str) -> str:
    op = _OP_ALIASES.get(op, op)
    if op not in _PY_OPS:
        raise ValueError(f"unknown set operation {op!r}")
    return op


def _store(num, den):
    """Pick the storage dtype: int64 when everything fits, else Python ints."""
    if len(num) == 0:
        return np.zeros(0, dtype=np.int64), np.ones(0, dtype=np.int64)
    if num.dtype != object and den.dtype != object:
        return num.astype(np.int64, copy=False), den.astype(np.int64, copy=False)
    if max(abs(int(v)) for v in num) < _INT64_STORE and max(int(v) for v in den) < _INT64_STORE:
        return num.astype(np.int64), den.astype(np.int64)
    return num, den


def _arrays_from_fractions(values):
    num = np.array([v.numerator for v in values], dtype=object)
    den = np.array([v.denominator for v in values], dtype=object)
    return _store(num, den)


class FiniteSet:
    """A finite set of rationals, kept sorted ascending and duplicate-free.

    Construct from any iterable of ints, Fractions or scalar strings.  The
    usual operators are Minkowski operations with the default budget, so
    ``A - A`` is the difference set and ``A / A`` the ratio set.
    """

    __slots__ = ("_num", "_den", "_elements", "_hash", "_bounds")

    def __init__(self, values: Iterable = ()):
        elements = sorted({as_rational(v) for v in values})
        self._num, self._den = _arrays_from_fractions(elements)
        self._elements = tuple(elements)
        self._hash = None
        self._bounds = None

    @classmethod
    def _from_canonical(cls, num, den) -> "FiniteSet":
        # Trusted: arrays are reduced, den > 0, strictly increasing in value.
        obj = cls.__new__(cls)
        obj._num, obj._den = _store(num, den)
        obj._num.flags.writeable = False
        obj._den.flags.writeable = False
        obj._elements = None
        obj._hash = None
        obj._bounds = None
        return obj

    @property
    def elements(self) -> tuple:
        if self._elements is None:
            self._elements = tuple(
                Fraction(int(n), int(d)) for n, d in zip(self._num.tolist(), self._den.tolist())
            )
        return self._elements

    @property
    def numerators(self):
        return self._num

    @property
    def denominators(self):
        return self._den

    def __len__(self):
        return len(self._num)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, value):
        try:
            value = as_rational(value)
        except (TypeError, ValueError):
            return False
        els = self.elements
        i = bisect_left(els, value)
        return i < len(els) and els[i] == value

    def __eq__(self, other):
        if not isinstance(other, FiniteSet):
            return NotImplemented
        return (
            len(self) == len(other)
            and np.array_equal(self._num, other._num)
            and np.array_equal(self._den, other._den)
        )

    def __hash__(self):
        if self._hash is None:
            if self._num.dtype == object:
                self._hash = hash(self.elements)
            else:
                self._hash = hash((len(self), self._num.tobytes(), self._den.tobytes()))
        return self._hash

    def __repr__(self):
        shown = [format_scalar(v) for v in self.elements[:12]]
        if len(self) > 12:
            shown.append(f"... ({len(self)} elements)")
        return "FiniteSet({" + ", ".join(shown) + "})"

    def __add__(self, other):
        return pairwise("+", self, _coerce(other))

    def __sub__(self, other):
        return pairwise("-", self, _coerce(other))

    def __mul__(self, other):
        return pairwise("*", self, _coerce(other))

    def __truediv__(self, other):
        return pairwise("/", self, _coerce(other))

    def __neg__(self):
        return affine(self, -1, 0)

    def __or__(self, other):
        return union(self, other)

    def _max_bounds(self):
        # (max |numerator|, max denominator) as Python ints
        if self._bounds is None:
            if len(self) == 0:
                self._bounds = (0, 1)
            elif self._num.dtype == object:
                self._bounds = (max(abs(int(v)) for v in self._num), max(int(v) for v in self._den))
            else:
                self._bounds = (int(np.abs(self._num).max()), int(self._den.max()))
        return self._bounds

    @property
    def is_integral(self) -> bool:
        return bool(np.all(self._den == 1))

    def min(self) -> Fraction:
        return self.elements[0]

    def max(self) -> Fraction:
        return self.elements[-1]

    def all_positive(self) -> bool:
        return len(self) > 0 and bool(self._num[0] > 0)

    def nonzero(self) -> "FiniteSet":
        keep = self._num != 0
        if bool(np.all(keep)):
            return self
        return FiniteSet._from_canonical(self._num[keep], self._den[keep])

    def issubset(self, other: "FiniteSet") -> bool:
        return set(self.elements) <= set(other.elements)


def _coerce(value) -> FiniteSet:
    if isinstance(value, FiniteSet):
        return value
    return FiniteSet([value])


def from_values(values: Iterable) -> FiniteSet:
    return FiniteSet(values)


# ---------------------------------------------------------------- kernels


def _dedup_pairs(n, d):
    """Drop repeated (num, den) pairs; output order is canonical for the pairs."""
    if d is None:
        return np.unique(n), None
    if len(n) == 0:
        return n, d
    nmax = int(np.abs(n).max())
    dmax = int(d.max())
    if (2 * nmax + 1) * (dmax + 1) < (1 << 63):
        width = dmax + 1
        key = np.unique((n + nmax) * width + d)
        return key // width - nmax, key % width
    order = np.lexsort((d, n))
    n, d = n[order], d[order]
    keep = np.empty(len(n), dtype=bool)
    keep[0] = True
    keep[1:] = (n[1:] != n[:-1]) | (d[1:] != d[:-1])
    return n[keep], d[keep]


def _value_order(n, d):
    if d is None:
        return n, np.ones_like(n)
    key = n.astype(np.float64) / d.astype(np.float64)
    order = np.argsort(key, kind="stable")
    n, d, key = n[order], d[order], key[order]
    ties = np.flatnonzero(key[1:] == key[:-1])
    if ties.size:
        # distinct rationals that round to one float: order them exactly
        n, d = n.copy(), d.copy()
        start = None
        tie_set = set(ties.tolist())
        for i in range(len(n)):
            if i in tie_set:
                if start is None:
                    start = i
            elif start is not None:
                run = sorted(Fraction(int(n[j]), int(d[j])) for j in range(start, i + 1))
                n[start:i + 1] = [f.numerator for f in run]
                d[start:i + 1] = [f.denominator for f in run]
                start = None
    return n, d


def _pair_block(op, sn, sd, tn, td, integral):
    a = sn[:, None]
    if integral:
        if op == "+":
            n = a + tn
        elif op == "-":
            n = a - tn
        else:
            n = a * tn
        return np.unique(n.ravel()), None
    b = sd[:, None]
    if op == "+":
        n, d = a * td + tn * b, b * td
    elif op == "-":
        n, d = a * td - tn * b, b * td
    elif op == "*":
        n, d = a * tn, b * td
    else:
        n, d = a * td, b * tn
        sign = np.sign(d)
        n, d = n * sign, d * sign
    n, d = n.ravel(), d.ravel()
    g = np.gcd(n, d)
    return _dedup_pairs(n // g, d // g)


def _merge_runs(parts):
    if len(parts) == 1:
        return parts[0]
    n = np.concatenate([p[0] for p in parts])
    if parts[0][1] is None:
        return np.unique(n), None
    return _dedup_pairs(n, np.concatenate([p[1] for p in parts]))


def _fits_int64(op, S, T) -> bool:
    if S._num.dtype == object or T._num.dtype == object:
        return False
    ns, ds = S._max_bounds()
    nt, dt = T._max_bounds()
    if op in "+-":
        need = max(ns * dt + nt * ds, ds * dt)
    elif op == "*":
        need = max(ns * nt, ds * dt)
    else:
        need = max(ns * dt, ds * nt)
    return need < _FLOAT_EXACT


def _pairwise_numpy(op, S, T, budget, workers):
    integral = op != "/" and S.is_integral and T.is_integral
    tn, td = T._num, T._den
    rows = max(1, _CHUNK_PAIRS // len(T))
    if workers > 1:
        rows = max(1, min(rows, -(-len(S) // workers)))

    def block(start):
        stop = start + rows
        return _pair_block(op, S._num[start:stop], S._den[start:stop], tn, td, integral)

    starts = range(0, len(S), rows)
    parts, held = [], 0
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(block, starts))
    else:
        results = map(block, starts)
    for part in results:
        budget.check(len(part[0]))
        parts.append(part)
        held += len(part[0])
        if held > _MERGE_AT and len(parts) > 1:
            parts = [_merge_runs(parts)]
            held = len(parts[0][0])
            budget.check(held)
    n, d = _merge_runs(parts)
    budget.check(len(n))
    return FiniteSet._from_canonical(*_value_order(n, d))


def _pairwise_exact(op, S, T, budget):
    f = _PY_OPS[op]
    right = T.elements
    out = set()
    for s in S.elements:
        out.update(f(s, t) for t in right)
        budget.check(len(out))
    return FiniteSet._from_canonical(*_arrays_from_fractions(sorted(out)))


def pairwise(op: str, S: FiniteSet, T: FiniteSet, budget: Budget | None = None,
             *, workers: int | None = None) -> FiniteSet:
    """The set ``{s op t : s in S, t in T}``.

    For ``/`` pairs with ``t == 0`` are skipped; :class:`EmptyDenominator`
    is raised only when ``T`` has no nonzero element at all.
    """
    op = _canon_op(op)
    budget = budget or Budget()
    if op == "/":
        T = T.nonzero()
        if len(T) == 0:
            raise EmptyDenominator("every denominator is zero")
    if len(S) == 0 or len(T) == 0:
        return FiniteSet()
    if _fits_int64(op, S, T):
        return _pairwise_numpy(op, S, T, budget, workers or _workers)
    return _pairwise_exact(op, S, T, budget)


def kfold(op: str, S: FiniteSet, k: int, budget: Budget | None = None,
          *, workers: int | None = None) -> FiniteSet:
    """k-fold sumset ``kS`` (op ``+``) or product set ``S^(k)`` (op ``*``)."""
    op = _canon_op(op)
    if op not in "+*":
        raise ValueError("k-fold is defined for + and * only")
    if k < 1:
        raise ValueError("k must be >= 1")
    budget = budget or Budget()
    result = S
    for _ in range(k - 1):
        result = pairwise(op, result, S, budget, workers=workers)
    return result


def affine(S: FiniteSet, scale, shift) -> FiniteSet:
    """``{scale*s + shift}``; a nonzero scale preserves cardinality."""
    scale, shift = as_rational(scale), as_rational(shift)
    if scale == 0:
        raise ZeroScale("affine map needs a nonzero scale")
    if len(S) == 0:
        return S
    p, q = scale.numerator, scale.denominator
    u, v = shift.numerator, shift.denominator
    if S._num.dtype != object:
        nmax, dmax = S._max_bounds()
        if abs(p) * nmax * v + abs(u) * q * dmax < _FLOAT_EXACT and q * dmax * v < _FLOAT_EXACT:
            n = S._num * (p * v) + S._den * (u * q)
            d = S._den * (q * v)
            g = np.gcd(n, d)
            n, d = n // g, d // g
            if scale < 0:
                n, d = n[::-1], d[::-1]
            return FiniteSet._from_canonical(n, d)
    values = [scale * s + shift for s in S.elements]
    if scale < 0:
        values.reverse()
    return FiniteSet._from_canonical(*_arrays_from_fractions(values))


def union(*sets: FiniteSet) -> FiniteSet:
    sets = [s for s in sets if len(s)]
    if not sets:
        return FiniteSet()
    if len(sets) == 1:
        return sets[0]
    if all(s._num.dtype != object for s in sets):
        n = np.concatenate([s._num for s in sets])
        d = np.concatenate([s._den for s in sets])
        if bool(np.all(d == 1)):
            return FiniteSet._from_canonical(*_value_order(np.unique(n), None))
        return FiniteSet._from_canonical(*_value_order(*_dedup_pairs(n, d)))
    out = set()
    for s in sets:
        out.update(s.elements)
    return FiniteSet._from_canonical(*_arrays_from_fractions(sorted(out)))


# ---------------------------------------------------------------- set files


def parse_set_text(text: str, source: str = "<string>") -> FiniteSet:
    """Read the set-file format: one scalar per line, ``#`` comments."""
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(parse_scalar(line))
        except ParseError as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from None
    return FiniteSet(values)


def load_set(path) -> FiniteSet:
    with open(path, encoding="utf-8") as fh:
        return parse_set_text(fh.read(), source=str(path))


def format_set(S: FiniteSet) -> str:
    return "".join(format_scalar(v) + "\n" for v in S.elements)


def dump_set(S: FiniteSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_set(S))
