"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class GenpairError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(GenpairError, ValueError):
    """Invalid model definition."""


class NormalizationError(ModelError):
    """The squared coupling amplitudes do not sum to one."""


class InvalidShell(ModelError):
    """A shell has a non-physical capacity or amplitude."""


class DuplicateLabel(ModelError):
    """Two shells share the same label."""


class DimensionCapExceeded(GenpairError):
    """A requested matrix would exceed the configured dimension cap."""


class EigensolveFailure(GenpairError):
    """The dense eigensolver did not converge."""


class PoleProximity(GenpairError, ArithmeticError):
    """A root lies within the exclusion radius of a pole 1/c_j^2."""


class NonPhysicalSolution(GenpairError):
    """A root set yields a complex or singular energy."""


class NoConvergence(GenpairError):
    """Newton iteration or path tracking failed for one start point."""


class ZeroState(GenpairError):
    """A collective-pair product expands to the zero vector."""


class IncompleteBethe(GenpairError):
    """The Bethe solver found fewer levels than the oracle rank."""
