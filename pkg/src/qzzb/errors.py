"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain on which an operation is defined."""


class BracketError(ValueError):
    """A root bracket does not enclose a sign change."""


class TailMassError(ValueError):
    """A Fock-space truncation discards more probability than allowed.

    ``required_cutoff`` carries the smallest cutoff that meets the tolerance.
    """

    def __init__(self, message, required_cutoff=None):
        super().__init__(message)
        self.required_cutoff = required_cutoff


class NumericalError(ArithmeticError):
    """A numerical check failed (non-PSD density matrix, non-finite result, ...)."""
