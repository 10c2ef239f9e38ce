"""Exception types shared across the package."""


class ChshLabError(Exception):
    """Base class for every error raised by chshlab."""


class NotHermitianError(ChshLabError, ValueError):
    """Matrix expected to be Hermitian deviates beyond tolerance."""


class NonUnitAxisError(ChshLabError, ValueError):
    """Bloch axis is not a unit vector."""


class OutOfRangeError(ChshLabError, ValueError):
    """Scalar parameter outside its admissible interval."""


class NotUnbiasedError(ChshLabError, ValueError):
    """POVM effect has trace != 1, outside the unbiased family."""


class InvalidToleranceError(ChshLabError, ValueError):
    """Non-positive tolerance or iteration budget."""


class NotInvolutiveError(ChshLabError, ValueError):
    """Observable does not square to the identity."""


class InvalidStateError(ChshLabError, ValueError):
    """Density matrix violates Hermiticity, trace or positivity."""


class NonRealTraceError(ChshLabError, ArithmeticError):
    """Trace that must be real carries a large imaginary part.

    Raised only when operator assembly went wrong, never for valid input.
    """


class DegenerateDeltaError(ChshLabError, ValueError):
    """Stationarity relations are singular at full incompatibility."""
