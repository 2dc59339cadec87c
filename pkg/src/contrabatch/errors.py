"""Exception types shared across the package."""


class ContrabatchError(Exception):
    """Base class for all library-specific errors."""


class FormatError(ContrabatchError):
    """A file does not conform to its declared on-disk format."""


class DataError(ContrabatchError):
    """Contents parse but carry invalid values (NaN, Inf, wrong shape)."""


class DegenerateRowError(DataError):
    """One or more rows have near-zero norm and cannot be normalized."""

    def __init__(self, rows):
        self.rows = [int(r) for r in rows]
        super().__init__(f"rows with norm below 1e-12: {self.rows}")


class CapacityError(ContrabatchError):
    """Requested problem size exceeds a hard implementation limit."""


class PermutationError(ContrabatchError):
    """An index sequence is not a bijection on {0..N-1}."""


class ParameterError(ContrabatchError):
    """A parameter lies outside its documented domain."""


class GraphError(ContrabatchError):
    """A graph violates structural requirements (symmetry, self-loops)."""


class ObjectiveUndefined(ContrabatchError):
    """The requested objective has no value on this assignment."""
