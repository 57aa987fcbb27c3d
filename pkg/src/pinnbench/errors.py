class BenchError(Exception):
    pass


class ContractError(BenchError, ValueError):
    """A caller violated an operation's preconditions."""


class EvaluationError(BenchError, ArithmeticError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class UndefinedMetricError(BenchError, ZeroDivisionError):
    pass


class GeometryError(BenchError):
    pass


class UnsupportedCase(BenchError):
    """The (case, method) pair is marked '--' or the geometry is not handled."""


class ReferenceFormatError(BenchError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ConfigError(BenchError, ValueError):
    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class Divergence(BenchError):
    """Training produced a non-finite loss or gradient."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
