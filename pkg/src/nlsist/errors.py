"""Exception and warning types shared across the package."""


class NLSError(Exception):
    """Base class for all package errors."""


class GammaPoleError(NLSError, ValueError):
    pass


class SpectralSingularityError(NLSError):
    """a(z) vanishes (numerically) at a real point z."""

    def __init__(self, z, modulus):
        self.z = z
        self.modulus = modulus
        super().__init__(f"spectral singularity near real z = {z:.12g} (|a| = {modulus:.3e})")


class DuplicatePoleError(NLSError, ValueError):
    pass


class EigenvalueCountError(NLSError):
    """Newton refinement disagrees with the argument-principle count."""


class MultiplicityError(NLSError):
    pass


class ProportionalityError(NLSError):
    """Jost columns at a claimed eigenvalue are not proportional."""


class IntegrationError(NLSError):
    """ODE step-size underflow or quadrature failure."""

    def __init__(self, message, x=None):
        self.x = x
        super().__init__(message if x is None else f"{message} (at x = {x:.6g})")


class DegenerateReflectionError(NLSError, ValueError):
    pass


class ContourEvaluationError(NLSError, ValueError):
    """Point lies on a jump contour or pole where evaluation is undefined."""


class OutsideConeError(NLSError, ValueError):
    pass


class NonDistinctSpeedError(NLSError, ValueError):
    pass


class BoundaryContaminationWarning(UserWarning):
    pass


class ConditioningWarning(UserWarning):
    pass


class ConvergenceWarning(UserWarning):
    pass
