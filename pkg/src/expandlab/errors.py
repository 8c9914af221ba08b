"""Exception hierarchy shared by every module.

All errors derive from :class:`ExpandLabError` so the CLI can catch one type
and turn it into a nonzero exit status.
"""


class ExpandLabError(Exception):
    """Base class for all engine errors."""


class ZeroDenominator(ExpandLabError, ZeroDivisionError):
    pass


class ParseError(ExpandLabError, ValueError):
    """Malformed scalar, set file or expression text.

    ``position`` is a 0-based character offset (or None when not meaningful)
    and ``expected`` the sorted collection of tokens that would have been
    accepted there.
    """

    def __init__(self, message, position=None, expected=()):
        self.position = position
        self.expected = tuple(sorted(expected))
        detail = message
        if position is not None:
            detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class EmptyDenominator(ExpandLabError):
    """A ratio set was requested but every denominator is zero."""


class BudgetExceeded(ExpandLabError):
    def __init__(self, count, limit):
        self.count = count
        self.limit = limit
        super().__init__(f"result has at least {count} distinct elements, budget is {limit}")


class ZeroScale(ExpandLabError, ValueError):
    pass


class UnboundName(ExpandLabError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"unbound set name {self.name!r}"


class MissingInput(ExpandLabError, ValueError):
    pass


class PositivityViolation(ExpandLabError, ValueError):
    pass


class NonPositiveElement(PositivityViolation):
    pass


class TooSmall(ExpandLabError, ValueError):
    pass


class TooLarge(ExpandLabError, ValueError):
    pass


class ZeroInMultiplicativeMode(ExpandLabError, ValueError):
    pass


class PreconditionViolation(ExpandLabError, ValueError):
    pass


class DegenerateFamily(ExpandLabError, ValueError):
    pass
