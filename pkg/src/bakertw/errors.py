"""Exception types shared across the package."""


class UsageError(ValueError):
    """Bad arguments: out-of-range ids, empty sets, violated preconditions."""


class SpecError(UsageError):
    """A structured parameter record (jump spec, constants) is inconsistent."""


class GraphFormatError(ValueError):
    """A text or JSON artifact failed to parse."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExhausted(RuntimeError):
    """A brute-force search stopped before it could decide the instance.

    Distinct from a proven negative answer, which is reported as ``None``.
    """

    def __init__(self, message, nodes=0):
        self.nodes = nodes
        super().__init__(message)
