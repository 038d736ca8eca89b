"""Exception types raised across the package."""


class InvariantError(ValueError):
    """A state or operator violates a required numeric invariant."""


class TruncationError(ValueError):
    """An operation would push photons past the basis cutoff."""


class StateFormatError(ValueError):
    """A state file does not conform to the JSON state schema."""
