"""Shared exception types."""


class CertificationError(RuntimeError):
    """An internal consistency certificate failed; the run cannot be trusted."""


class OutOfScaleError(ValueError):
    """The requested instance exceeds the configured desk-scale point bound."""


class BudgetExceededError(RuntimeError):
    """A randomised search (meataxe words, homomorphism hunt) ran out of budget."""
