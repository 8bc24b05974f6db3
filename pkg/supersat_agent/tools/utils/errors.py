"""Exceptions raised by the supersaturation toolkit.

Library code raises these; the tools turn them into ``Error: ...`` text and
the command line maps them to exit code 2.
"""

from typing import Optional


class SupersatError(Exception):
    """Base class for every error raised by the toolkit."""


class HostGraphError(SupersatError):
    """Invalid host (hyper)graph, or a query the host cannot answer."""


class PatternError(SupersatError):
    """Malformed pattern description, query arity mismatch or empty query."""


class BoundError(SupersatError):
    """A bound formula was evaluated outside its domain."""


class EmptyFamilyError(SupersatError):
    """An operation that needs at least one copy received an empty family."""


class GuardExceededError(SupersatError):
    """An exhaustive routine was asked to run above its size guard."""

    def __init__(self, what: str, size: int, guard: int):
        super().__init__(f"{what} size {size} exceeds guard {guard}")
        self.what = what
        self.size = size
        self.guard = guard


class VacuousParametersError(SupersatError):
    """A reachable degree cap floors to zero, so no copy could ever be added."""

    def __init__(self, index, value: float):
        super().__init__(
            f"vacuous parameters: cap for {index} is {value:.6g}, which floors to 0"
        )
        self.index = index
        self.value = value


class ContainerError(SupersatError):
    """The container step cannot run on the given input."""


class CodegreeCheckError(ContainerError):
    """delta(H, tau) exceeds eps, so the container theorem does not apply."""

    def __init__(self, value: float, eps: float, tau: float):
        super().__init__(
            f"codegree check failed: delta(H,tau)={value:.6g} > eps={eps:.6g} (tau={tau:.6g})"
        )
        self.value = value
        self.eps = eps
        self.tau = tau


class DegenerateTauError(ContainerError):
    """tau is outside (0, 1)."""

    def __init__(self, tau: float):
        super().__init__(f"degenerate tau={tau:.6g}; expected 0 < tau < 1")
        self.tau = tau


class PipelineAbort(SupersatError):
    """Diagnostic record for a pipeline level that could not be completed."""

    def __init__(self, level: int, container: int, reason: str, cause: Optional[Exception] = None):
        super().__init__(f"level {level}, container {container}: {reason}")
        self.level = level
        self.container = container
        self.reason = reason
        self.cause = cause
