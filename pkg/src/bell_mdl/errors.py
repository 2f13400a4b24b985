"""Exception types shared across the package.

The CLI maps these onto its exit codes: :class:`DomainError` -> 2,
:class:`ConvergenceError` -> 3.
"""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NoSignChangeError(DomainError):
    """A root bracket whose end points do not straddle a sign change."""


class ConvergenceError(ArithmeticError):
    """A numerical routine exhausted its budget before meeting tolerance."""
