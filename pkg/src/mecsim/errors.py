"""Exception types shared across the package."""


class ScenarioError(ValueError):
    """Base class for malformed or inconsistent scenario data."""


class ParseError(ScenarioError):
    """Scenario or config document could not be parsed."""


class DimensionMismatchError(ScenarioError):
    """An array field does not have the declared shape."""


class NonPositiveCapacityError(ScenarioError):
    """A capacity, demand, or service size is not strictly positive."""


class EmptyCoverageError(ScenarioError):
    """A user has no reachable base station in some slot."""

    def __init__(self, user: int, slot: int):
        self.user = user
        self.slot = slot
        super().__init__(f"coverage empty for user {user} at slot {slot}")


class InfeasibleError(Exception):
    """No decision satisfies the constraints at the requested slot."""


class NoInteriorPointError(InfeasibleError):
    """The capacity-margin polytope is empty although the unmargined one is not."""


class OverloadedPointError(Exception):
    """Gradient requested at a point where some station load reaches capacity."""


class RoundingFailedError(Exception):
    """No feasible integral decision found by sampling or greedy repair."""


class OracleTooLargeError(Exception):
    """Exhaustive search would exceed the enumeration budget."""


class UncoverableAreaError(Exception):
    """Generator geometry leaves part of the movement area with no coverage."""
