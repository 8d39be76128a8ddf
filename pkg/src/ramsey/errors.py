"""Exception types and the three-valued ``Unknown`` verdict."""

from __future__ import annotations


class RamseyError(Exception):
    """Base class for library errors."""


class InputError(RamseyError, ValueError):
    """Malformed input or violated precondition."""


class PrefixTooShort(InputError):
    """A stream was consulted beyond the data it carries."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"need longer prefix: entry {index} is not available")


class BudgetExhausted(RamseyError):
    """A bounded search or scan ran out of budget before deciding."""

    def __init__(self, message: str, bound: int | None = None):
        self.bound = bound
        super().__init__(message)


class Inconclusive(RamseyError):
    """A classification could not be decided within its documented bound."""

    def __init__(self, message: str, bound: int | None = None):
        self.bound = bound
        super().__init__(message)


class Unknown:
    """Third truth value: the question is not decidable from the data consulted.

    Deliberately refuses ``bool()`` so it can never be silently coerced.
    """

    __slots__ = ("reason", "bound")

    def __init__(self, reason: str, bound: int | None = None):
        self.reason = reason
        self.bound = bound

    def __bool__(self):
        raise TypeError(f"Unknown verdict cannot be used as a boolean ({self.reason})")

    def __repr__(self):
        if self.bound is None:
            return f"Unknown({self.reason!r})"
        return f"Unknown({self.reason!r}, bound={self.bound})"

    def __eq__(self, other):
        return isinstance(other, Unknown) and other.reason == self.reason and other.bound == self.bound

    def __hash__(self):
        return hash(("Unknown", self.reason, self.bound))

    def to_json(self):
        return {"unknown": True, "reason": self.reason, "bound": self.bound}


def is_unknown(value) -> bool:
    return isinstance(value, Unknown)
