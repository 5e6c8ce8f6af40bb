"""Exception types shared across the package."""


class GraphFormatError(ValueError):
    """A graph document violates the file format or its invariants."""


class InfeasibleError(ValueError):
    """Requested parameters cannot be satisfied (e.g. budget exceeds n)."""


class EnumerationLimitError(ValueError):
    """An exact computation would exceed its combinatorial limit."""
