class TrimlabError(Exception):
    """Base class of all errors raised by trimlab."""

    pass


class ShapeError(TrimlabError, ValueError):
    """
    Indicates an invalid convolution geometry or a dimension mismatch.

    E.g. an ifmap whose size differs from the `ConvShape`, or a kernel that is not `K x K`.
    """

    pass


class DomainError(TrimlabError, ValueError):
    """An argument lies outside the domain of an equation or of the schedule."""

    pass


class ConfigurationError(TrimlabError):
    """Invalid configuration: alpha table, sweep specification, output format, ..."""

    pass


class SimulationError(TrimlabError):
    """
    A simulator detected an internal inconsistency.

    This signals a scheduler or wiring bug (e.g. a PE received a different operand than
    the convolution requires), not a user error.
    """

    pass


class PsumOverflowError(SimulationError):
    """A psum left the range of the configured psum width."""

    pass


class ArrayStateError(SimulationError):
    """The operation is not allowed in the current state of the array."""

    pass


class IdentityViolation(TrimlabError):
    """
    A simulated quantity differs from its closed-form value (or from the golden ofmap).

    `point` is the `(dataflow, K, I)` triple of the offending grid point.
    """

    def __init__(self, point: tuple, quantity: str, expected, actual):
        self.point = point
        self.quantity = quantity
        self.expected = expected
        self.actual = actual
        dataflow, k, i = point
        super().__init__(
            f"{quantity} mismatch at (dataflow={dataflow}, K={k}, I={i}): "
            f"formula gives {expected}, simulation gives {actual}"
        )
