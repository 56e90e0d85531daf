"""Exceptions shared across the package."""


class RegimeViolation(ValueError):
    """Raised when parameters leave the regime in which a quantity is defined.

    Typical causes: the random walk backing a distribution does not drift
    toward the honest chain (e.g. beta1 >= alpha0), or a steady state does
    not exist for the requested chain.
    """


class NonConvergence(RuntimeError):
    """A truncated series failed to accumulate its target mass within the index cap."""


class HorizonTooSmall(RuntimeError):
    """Too many simulated races hit the step horizon for the estimate to be trusted."""
