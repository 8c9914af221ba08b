"""Exact computations with sum-product expander sets over the rationals."""

from .errors import BudgetExceeded, ExpandLabError, ParseError
from .expanders import named_expander, r_set
from .expr import eval_text, evaluate, parse, to_text
from .finset import Budget, FiniteSet, load_set, pairwise
from .numeric import Rational, format_scalar, parse_scalar

__version__ = "0.1.0"

__all__ = [
    "Budget", "BudgetExceeded", "ExpandLabError", "FiniteSet", "ParseError", "Rational",
    "eval_text", "evaluate", "format_scalar", "load_set", "named_expander", "pairwise",
    "parse", "parse_scalar", "r_set", "to_text",
]
