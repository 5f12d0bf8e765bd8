"""Exception types raised across the package.

Everything derives from :class:`PhavailError`, itself a ``ValueError``, so
callers that only care about "bad input" can catch the builtin.
"""


class PhavailError(ValueError):
    pass


# -- generators and distributions ---------------------------------------------

class NonSquare(PhavailError):
    def __init__(self, shape):
        self.shape = tuple(shape)
        super().__init__(f"matrix must be square, got shape {self.shape}")


class NegativeOffDiagonal(PhavailError):
    def __init__(self, i, j, value):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"off-diagonal entry ({i}, {j}) is negative: {value!r}")


class PositiveDiagonal(PhavailError):
    def __init__(self, i, value):
        self.i, self.value = i, value
        super().__init__(f"diagonal entry ({i}, {i}) is positive: {value!r}")


class RowSumNonzero(PhavailError):
    def __init__(self, i, residual):
        self.i, self.residual = i, residual
        super().__init__(f"row {i} sums to {residual!r}, expected 0")


class InvalidDistribution(PhavailError):
    pass


class DimensionMismatch(PhavailError):
    pass


class NegativeTime(PhavailError):
    def __init__(self, t):
        self.t = t
        super().__init__(f"time must be finite and >= 0, got {t!r}")


class SingularSystem(PhavailError):
    pass


class SingularMatrix(PhavailError):
    pass


class NonPositiveRate(PhavailError):
    def __init__(self, name, value):
        self.name, self.value = name, value
        super().__init__(f"{name} must be a finite positive rate, got {value!r}")


# -- systems and simulation ---------------------------------------------------

class EmptySystem(PhavailError):
    pass


class TooManyComponents(PhavailError):
    pass


class InvalidPlan(PhavailError):
    pass


# -- configuration files ------------------------------------------------------

class ConfigError(PhavailError):
    """Problem with a model configuration document."""


class ConfigSyntaxError(ConfigError):
    def __init__(self, line, msg):
        self.line = line
        super().__init__(f"line {line}: {msg}")


class UnknownField(ConfigError):
    def __init__(self, name, where):
        self.name = name
        super().__init__(f"{where}: unknown field {name!r}")


class MissingField(ConfigError):
    def __init__(self, name, where):
        self.name = name
        super().__init__(f"{where}: missing required field {name!r}")


class InvalidRate(ConfigError):
    def __init__(self, field, value, where=""):
        self.field, self.value = field, value
        prefix = f"{where}: " if where else ""
        super().__init__(f"{prefix}invalid {field} {value!r}")


class UnknownLaw(ConfigError):
    def __init__(self, value, where=""):
        self.value = value
        prefix = f"{where}: " if where else ""
        super().__init__(f"{prefix}unknown law {value!r} (expected 'lindley' or 'exponential')")
