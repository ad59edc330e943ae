"""Exception hierarchy shared by all vessiot modules."""


class VessiotError(Exception):
    """Base class for all errors raised by this package."""


class DivisionByZero(VessiotError):
    """A divisor normalized to the zero rational expression."""


class CyclicBinding(VessiotError):
    """A substitution binds a variable that reappears in a replacement."""


class UnknownVariable(VessiotError):
    """A name does not resolve to any declared variable."""


class DenominatorVanishes(VessiotError):
    """Point evaluation hit a zero denominator; retry at another point."""


class OrderOverflow(VessiotError):
    """A jet bump would exceed the context's max_order."""


class NotClosed(VessiotError):
    """A bracket left the rational span of the generator set."""


class DegenerateLocus(VessiotError):
    """Symbol elimination needs a pivot outside the declared genericity."""


class DegenerateMetric(VessiotError):
    """det of the first fundamental form normalized to zero."""


class DegenerateCurve(VessiotError):
    """The curve's speed invariant normalized to zero."""


class ZeroCurvatureLocus(VessiotError):
    """Torsion requested where the curvature invariant vanishes."""


class SingularFrame(VessiotError):
    """A frame matrix is not invertible in the rational-function field."""


class CertificateSearchExceeded(VessiotError):
    """Radical-membership certificate construction beyond the bound."""


class NotAMultiplier(VessiotError):
    """The declared multiplier fails its divergence precondition."""


class DegenerateHamiltonian(VessiotError):
    """H_p vanishes identically; separability conditions undefined."""


class ProblemSyntaxError(VessiotError):
    """Malformed problem file or expression text."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + where)


class UnknownReference(VessiotError):
    """A problem file refers to an undefined name."""


class ContextMismatch(VessiotError):
    """An object is used with a context it was not declared in."""
