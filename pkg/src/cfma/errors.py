"""Exception hierarchy for the cfma package."""


class CfmaError(Exception):
    """Base class for all numerical errors raised by cfma."""


class NonFiniteIntegrand(CfmaError):
    """An integrand evaluated to NaN or +/-inf on the integration support."""


class MethodUnsupported(CfmaError):
    """The requested expectation method cannot handle the gain laws."""


class DegenerateCoefficients(CfmaError):
    """Decoding coefficient vectors are zero or linearly dependent."""


class SingularGamma(CfmaError):
    """A scaling ratio of zero (or non-finite) was supplied."""


class ZeroMean(CfmaError):
    """A mean-ratio rule was requested for a user whose mean gain is zero."""


class NotIIDGaussian(CfmaError):
    """The i.i.d. Gaussian shortcut was requested for a different model."""


class ZeroCoefficient(CfmaError):
    """A coefficient vector has a zero entry where both must be nonzero."""
