class PCRException(Exception):
    """Baseclass for all our exceptions"""

    pass


class ConfigurationError(PCRException, ValueError):
    """Inputs that can not describe a valid circuit, basis, drive or campaign"""

    pass


class DeviceLoadError(ConfigurationError):
    """A device description file did not match the schema"""

    def __init__(self, msg, path=None, field=None):
        super().__init__(msg)
        self.path = path
        self.field = field

    def __str__(self):
        where = []
        if self.path is not None:
            where.append(str(self.path))
        if self.field is not None:
            where.append(f"field '{self.field}'")
        if where:
            return f"{self.args[0]} ({', '.join(where)})"
        return str(self.args[0])


class CellValidationError(ConfigurationError):
    """A unit cell's qubits are not distinct or not adjacent"""

    pass


class JournalMismatch(ConfigurationError):
    """Resume was requested, but the journal was written with other options"""

    pass


class NumericError(PCRException, ArithmeticError):
    """A numerical tolerance was violated"""

    pass


class ResonanceError(NumericError):
    """A closed form denominator came too close to zero"""

    pass


class HybridizationError(NumericError):
    """The computational subspace could not be identified in the spectrum"""

    def __init__(self, msg, overlaps=None):
        super().__init__(msg)
        self.overlaps = overlaps


class SeedingError(PCRException):
    """No feasible initial parameter vector"""

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics if diagnostics is not None else {}


class OptimizationFailed(PCRException):
    """The optimizer could not produce a usable result"""

    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace


class SweepFailed(PCRException):
    """every point of a sweep failed"""

    def __init__(self, msg, exceptions):
        super().__init__(msg)
        self.exceptions = exceptions
