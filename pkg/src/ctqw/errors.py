"""Exception hierarchy.

Every error raised by the library derives from :class:`CTQWError`.  Input
problems are also ``ValueError`` subclasses so callers that only catch the
builtin keep working; numerical failures derive from :class:`NumericalError`.
"""

from __future__ import annotations


class CTQWError(Exception):
    """Base class for library errors."""


class InputError(CTQWError, ValueError):
    """Invalid input data or parameters."""


class DisconnectedGraph(InputError):
    pass


class SelfLoop(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotQDGraph(InputError):
    """Stratum degrees are not homogeneous.

    Attributes record the offending stratum, the two vertices and which
    degree (``"down"``, ``"within"`` or ``"up"``) differs.
    """

    def __init__(self, stratum: int, u: int, v: int, which: str, du: int, dv: int):
        self.stratum = stratum
        self.vertices = (u, v)
        self.which = which
        super().__init__(
            f"stratum {stratum}: vertices {u} and {v} have {which}-degree {du} != {dv}"
        )


class UnsupportedFamily(InputError):
    pass


class ParameterOutOfDomain(InputError):
    pass


class NoClosedFormMeasure(InputError):
    pass


class NoClosedForm(InputError):
    pass


class TruncationTooLarge(InputError):
    pass


class UnsupportedEdgeBehavior(InputError):
    pass


class WindowTooShort(InputError):
    pass


class UnsupportedMomentOrder(InputError):
    pass


class InsufficientSpan(InputError):
    pass


class GraphTooLarge(InputError):
    pass


class NumericalError(CTQWError, ArithmeticError):
    """A computation failed to reach its accuracy target."""


class EigenSolverFailure(NumericalError):
    pass


class DivergentFraction(NumericalError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class TailMassExceeded(NumericalError):
    def __init__(self, tail: float, limit: float):
        self.tail = tail
        self.limit = limit
        super().__init__(f"tail mass {tail:.3e} exceeds {limit:.1e}; increase the truncation")


class DegenerateNodes(NumericalError):
    pass
