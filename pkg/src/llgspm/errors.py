"""Exception types raised across the solver suite."""


class LLGError(Exception):
    """Base class for all solver errors."""


class ZeroVector(LLGError, ValueError):
    """A cell vector has (numerically) zero length and cannot be normalized."""

    def __init__(self, index):
        self.index = tuple(int(i) for i in index)
        super().__init__(f"zero-length vector at cell (i, j, k) = {self.index}")


class MeshMismatch(LLGError, ValueError):
    """Two objects that must share a mesh do not."""


class Diverged(LLGError, ArithmeticError):
    """A time stepper produced non-finite values."""

    def __init__(self, step, label=None):
        self.step = step
        self.label = label
        where = f" ({label})" if label else ""
        super().__init__(f"non-finite magnetization after step {step}{where}")


class ParseError(LLGError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ValidationError(LLGError, ValueError):
    pass


class NotConverged(LLGError, RuntimeError):
    """A relaxation hit its step cap before meeting the stopping criterion."""
