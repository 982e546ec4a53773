"""Exception hierarchy shared by every multspec module.

Two families matter to callers: ``DomainError`` means the request was
mathematically out of range (degenerate map, superattracting window, bad
input document), ``NumericalError`` means the computation failed even after
the extended-precision retry.  The CLI maps the former to exit status 2 and
the latter to exit status 3.
"""


class MultspecError(Exception):
    """Base class for all library errors."""


class DomainError(MultspecError):
    """The requested object does not exist for this input."""


class NumericalError(MultspecError):
    """A numeric procedure failed after exhausting its retry ladder."""


class Degenerate(DomainError):
    """Resultant below threshold: the map is not a genuine degree-d endomorphism."""


class DegreeCap(DomainError):
    """An iterate would exceed the d**n coefficient-size guard."""


class SingularCurve(DomainError):
    """Weierstrass discriminant too close to zero."""


class ShapeMismatch(DomainError):
    """Two spectra with incompatible windows or block sizes were compared."""


class ParseError(DomainError):
    """Malformed map document."""


class ShapeError(DomainError):
    """Map document fields have inconsistent lengths."""


class Superattracting(DomainError):
    """A multiplier of magnitude <= tolerance lies in the requested window.

    ``period`` records the offending layer, so diagnostics can say where
    the reciprocal spectrum became undefined.
    """

    def __init__(self, period, message=None):
        self.period = period
        super().__init__(message or f"superattracting at period {period}")


class NotDivisible(NumericalError):
    """Form division residual exceeded tolerance at every precision tier."""


class Overflow(NumericalError):
    """A coefficient left the representable floating-point range."""


class NoConvergence(NumericalError):
    """Simultaneous root iteration did not settle within the sweep budget."""


class OrbitMatchFailed(NumericalError):
    """A periodic point's image matched no other root within tolerance."""


class CycleBroken(NumericalError):
    """The supplied points are not permuted cyclically by the map."""


class NotPeriodic(NumericalError):
    """The point did not return to itself within the stated period."""


class IndeterminatePoint(NumericalError):
    """Both homogeneous coordinates of an image vanished numerically."""
