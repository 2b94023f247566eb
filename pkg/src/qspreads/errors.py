"""Exception types shared across the package."""


class BudgetExceededError(RuntimeError):
    """An enumeration or table build would exceed its configured cap."""


class CertificationError(RuntimeError):
    """A constructed object failed its own validity check (internal bug)."""
