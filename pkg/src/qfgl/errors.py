"""Exception hierarchy shared by every qfgl module."""


class QfglError(Exception):
    """Base class for all library errors."""


class NonPrime(QfglError, ValueError):
    pass


class CapExceeded(QfglError):
    """A configured size cap would be exceeded."""


class SizeCapExceeded(CapExceeded):
    pass


class IterationCapExceeded(CapExceeded):
    pass


class EnumerationCapExceeded(CapExceeded):
    pass


class GraphCapExceeded(CapExceeded):
    pass


class CliqueCapExceeded(CapExceeded):
    pass


class DivisionByZero(QfglError, ZeroDivisionError):
    pass


class EvenCharacteristic(QfglError, ValueError):
    """Raised by operations that need an odd characteristic."""


class NotADivisor(QfglError, ValueError):
    pass


class OddDegree(QfglError, ValueError):
    pass


class ZeroForm(QfglError, ValueError):
    pass


class NotSymmetric(QfglError, ValueError):
    pass


class TrivialCharacter(QfglError, ValueError):
    pass


class WrongFormClass(QfglError, ValueError):
    pass


class DegreeDividesChar(QfglError, ValueError):
    pass


class ConstantPolynomial(QfglError, ValueError):
    pass
