"""Exception types shared across the package.

Validation problems (bad parameters, malformed files) derive from
:class:`ValidationError`; failures of a numerical procedure on otherwise
valid input derive from :class:`NumericalError`.  The command line maps the
two families onto exit codes 1 and 2.
"""


class ValidationError(ValueError):
    """Invalid parameter, configuration value or input record."""


class NumericalError(RuntimeError):
    """A numerical procedure could not produce a meaningful result."""


class DegenerateFitError(NumericalError):
    """Normal equations of a least-squares fit are singular."""

    def __init__(self, message, combination=None):
        super().__init__(message)
        # parameter name -> weight of the (near) null direction
        self.combination = combination or {}


class InsufficientCountsError(NumericalError):
    """Too few counts to form an estimator (zero denominator)."""
