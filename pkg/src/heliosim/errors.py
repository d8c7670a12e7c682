class NotFoundError(KeyError):
    """A technology node or agent id is not part of the structure queried."""


class InvariantViolation(ValueError):
    """A state object breaks a structural invariant (e.g. a non-closed tech set)."""


class IndeterminateError(ValueError):
    """Not enough recorded history to evaluate the requested quantity."""
