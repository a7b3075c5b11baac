"""Exception types shared across the package."""


class SigmaLabError(Exception):
    """Base class for all package errors."""


class ShapeError(SigmaLabError):
    """Raw table data has the wrong shape or out-of-range entries."""


class AxiomViolation(SigmaLabError):
    """An algebra axiom fails; carries the axiom name and a witnessing tuple."""

    def __init__(self, axiom, witness):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"axiom {axiom!r} violated at {witness!r}")


class InvalidHom(SigmaLabError):
    """A tabulated map does not preserve the structure."""

    def __init__(self, reason, witness=None):
        self.reason = reason
        self.witness = witness
        super().__init__(f"not a homomorphism: {reason} at {witness!r}")


class SignatureMismatch(SigmaLabError):
    """Operands live in different signatures or over unexpected objects."""


class ObjectMismatch(SigmaLabError):
    """Relation endpoints do not line up for composition."""


class NotACongruence(SigmaLabError):
    def __init__(self, witness, reason="not a congruence"):
        self.witness = witness
        super().__init__(f"{reason}: witness {witness!r}")


class NotEpi(SigmaLabError):
    """A map required to be surjective is not."""


class NotPullback(SigmaLabError):
    """A square required to be a pullback is not."""


class NotSigmaRelation(SigmaLabError):
    """The relation's first-projection point is outside the requested class."""


class NotSigmaGraph(SigmaLabError):
    """The graph's (d0, s0) point is outside the requested class."""


class NotAbelianSpecial(SigmaLabError):
    """Extension lacks a sigma-special abelian kernel relation."""


class DirectionMismatch(SigmaLabError):
    """Torsors do not share a direction."""


class BoundExceeded(SigmaLabError):
    """An enumeration was requested beyond its configured bound."""


class SelfCheckFailed(SigmaLabError):
    """Two independent computation routes disagreed (implementation-falsifying)."""

    def __init__(self, what, detail):
        self.what = what
        self.detail = detail
        super().__init__(f"self-check {what!r} failed: {detail}")


class ParseError(SigmaLabError):
    """A document cannot be parsed against the JSON schema."""

    def __init__(self, message, field=None, path=None):
        self.field = field
        self.path = path
        where = f" (field {field!r})" if field else ""
        at = f" in {path}" if path else ""
        super().__init__(f"{message}{where}{at}")


class MissingReference(ParseError):
    """A document refers to an algebra that is not loaded."""


class ConfigError(SigmaLabError):
    """Suite configuration is invalid."""
