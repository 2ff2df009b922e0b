"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a formula."""


class NotAchievedError(DomainError):
    """Signals a parameter point whose best constant is not achieved
    (b = a + 1, or b = a < 0): there is no extremal to compute."""


class NumericsError(RuntimeError):
    """An iterative numerical procedure failed to converge; the message
    carries diagnostics (residuals, brackets, iteration counts)."""
