"""Shared exception types with CLI exit-code semantics.

Exit-code mapping used by the command-line front end: input/parse problems
exit 2, infeasible programs exit 3, resource-guard refusals exit 4.
"""

__all__ = ["ProblemFileError", "InfeasibleProblemError", "ResourceGuardError", "GuardExceeded"]


class ProblemFileError(ValueError):
    """A problem file failed validation (exit code 2)."""


class InfeasibleProblemError(ValueError):
    """The requested program has no feasible point at these rates (exit code 3)."""


class ResourceGuardError(RuntimeError):
    """A computation was refused because it would exceed a size guard (exit code 4)."""


class GuardExceeded(ResourceGuardError):
    """Per-call tractability guard tripped; callers may fall back to a cheaper strategy."""
