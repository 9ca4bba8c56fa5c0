"""Exception types shared across the package."""


class PUError(Exception):
    """Base class for all errors raised by puosc."""


class DegenerateFrequencies(PUError, ValueError):
    pass


class NotOnRealitySurface(PUError, ValueError):
    """Raised when M^-1 X has imaginary parts above tolerance.

    The complex preimage is kept on ``.values`` so callers can inspect it.
    """

    def __init__(self, message, values=None):
        super().__init__(message)
        self.values = values


class StepTooLarge(PUError, ValueError):
    pass


class InsufficientSamples(PUError, ValueError):
    pass


class ZeroParameter(PUError, ValueError):
    pass


class VariableMismatch(PUError, ValueError):
    pass


class NotSecondClass(PUError, ValueError):
    pass


class NonPolynomial(PUError, TypeError):
    pass


class DimensionMismatch(PUError, ValueError):
    pass


class OrderTooLarge(PUError, ValueError):
    pass


class QuadratureDivergence(PUError, ValueError):
    pass


class GridTooCoarse(PUError, ValueError):
    pass


class Caustic(PUError, ValueError):
    """Kernel evaluated where a sine in its prefactor vanishes."""

    def __init__(self, message, frequency=None):
        super().__init__(message)
        self.frequency = frequency


class SingularDenominator(PUError, ValueError):
    pass


class NonpositiveEpsilon(PUError, ValueError):
    pass
