"""Exception hierarchy shared by every expnn module."""


class ExpnnError(Exception):
    """Base class for all library errors."""


class DomainError(ExpnnError, ValueError):
    """An argument lies outside the region where the quantity is defined."""


class ScaleTooSmallError(ExpnnError, ValueError):
    """The lattice window [ceil(n log a), floor(n log b)] is empty."""


class StencilError(ExpnnError, ValueError):
    """A finite-difference stencil leaves the function's domain."""


class PreconditionError(ExpnnError, ValueError):
    """A function lacks the tag (continuity, smoothness, Hoelder) a bound needs."""


class UnsupportedKernelError(ExpnnError, ValueError):
    """The requested bound only has constants for a different kernel."""


class KernelConstructionError(ExpnnError, ValueError):
    """The sigmoid fails the decay or symmetry condition required for a kernel."""


class FitError(ExpnnError, ValueError):
    """Not enough usable points for a convergence-rate fit."""


class UnknownNameError(ExpnnError, KeyError):
    """A catalogue lookup (sigmoid, function, operator family) failed."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class InvalidConfigError(ExpnnError, ValueError):
    """An experiment configuration violates its own invariants."""
