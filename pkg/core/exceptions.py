"""Exception hierarchy shared by the library modules."""


class LintransError(Exception):
    """Base class for every error raised by the core library."""


class GridError(LintransError, ValueError):
    """A grid or quadrature rule violates its construction invariants."""


class GridMismatchError(LintransError, ValueError):
    """Two sampled functions live on different grids."""


class GroupMismatchError(LintransError, TypeError):
    """Elements of different groups were combined."""


class ElementError(LintransError, ValueError):
    """A group element has parameters outside its group."""


class RepresentationError(LintransError, ValueError):
    """A representation was applied to an incompatible element or function."""


class AdmissibilityError(LintransError, ValueError):
    """Admissibility cannot be evaluated for the given vector."""


class CertificateError(LintransError, ValueError):
    """A dependency certificate is malformed or unverified."""


class ProbeError(LintransError, ValueError):
    """An independence probe received invalid input."""


class FormalSumError(LintransError, ValueError):
    """Formal sums of different kinds or modes were combined."""


class LiteralSyntaxError(LintransError, ValueError):
    """Text could not be parsed; carries the location of the problem."""

    def __init__(self, message: str, *, source: str = "<string>", line: int = 0, column: int = 0):
        self.source = source
        self.line = line
        self.column = column
        location = f"{source}:{line}:{column}" if line else source
        super().__init__(f"{location}: {message}")


class UnknownSuiteError(LintransError, KeyError):
    """No canned suite is registered under the requested name."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""
