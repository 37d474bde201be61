"""Exception types shared across the toolkit."""
from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all poslim errors."""


class AxiomViolation(ToolkitError):
    """A relation fails a poset axiom; carries the axiom name and a witness."""

    def __init__(self, axiom: str, witness) -> None:
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"poset axiom '{axiom}' violated at {witness!r}")


class NotAComplex(ToolkitError):
    """Consecutive differentials do not compose to zero."""


class IllDefined(ToolkitError):
    """A homomorphism matrix does not map source relations into target relations."""


class Nonfunctorial(ToolkitError):
    """A diagram's composites disagree; carries a witness triple (p, q, r)."""

    def __init__(self, witness) -> None:
        self.witness = witness
        super().__init__(f"diagram not functorial at triple {witness!r}")


class EmptySubset(ToolkitError):
    """A hyperspace operation received an empty subset."""


class NotProbability(ToolkitError):
    """Measure weights are not nonnegative rationals summing to 1."""


class DomainMismatch(ToolkitError):
    """Two objects live over different underlying spaces."""


class NotInE(ToolkitError):
    """The pair (a, X) is not a point of |E(P)|: a is not below the chain."""


class DiameterExceeded(ToolkitError):
    """The metric space has diameter > 1 where <= 1 is required."""


class NotInHull(ToolkitError):
    """A function vector is not a probability combination of embedded subsets."""


class PointSetMismatch(ToolkitError):
    """Two metrics are not defined on the same point set."""


class BadParameters(ToolkitError):
    """Stability-constant parameters out of range."""


class DimensionTooHigh(ToolkitError):
    """The base order complex has dimension > 1, so the two-column check does not apply."""


class TooLarge(ToolkitError):
    """Input exceeds the supported desk-scale size."""


class InputError(ToolkitError):
    """Malformed JSON input; carries file/context information."""
