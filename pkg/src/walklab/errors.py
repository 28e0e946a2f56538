"""Exception types raised across walklab."""

from __future__ import annotations


class WalklabError(Exception):
    """Base class for all walklab errors."""


class ParameterError(WalklabError, ValueError):
    """An argument lies outside the documented domain."""


class VertexError(ParameterError, IndexError):
    """A vertex label is outside ``0..n-1`` or was never reached."""


class SamplingExhausted(WalklabError):
    """Rejection sampling hit its attempt cap without a connected draw."""

    def __init__(self, attempts: int, message: str | None = None):
        self.attempts = attempts
        super().__init__(message or f"no connected sample after {attempts} attempts")


class SolverError(WalklabError):
    """An iterative linear solve failed to reach its tolerance."""

    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"solver did not converge: residual {residual:.3e} after {iterations} iterations"
        )


class OracleRefused(WalklabError):
    """A brute-force oracle was asked for an instance beyond its guard."""


class PreconditionError(WalklabError):
    """A construction was requested on an input that does not support it."""


class IdentityViolation(WalklabError):
    """Two independent evaluations of the same quantity disagreed."""
