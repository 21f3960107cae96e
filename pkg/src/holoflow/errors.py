"""Exception types shared across the package."""


class HoloflowError(Exception):
    """Base class for all holoflow errors."""


class ExpressionParseError(HoloflowError):
    """Malformed expression text; carries line and column."""

    def __init__(self, message, line=1, column=0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class PoleError(HoloflowError):
    """Evaluation requested at (or within 1e-14 of) a pole."""


class DegenerateTransformError(HoloflowError):
    """Moebius coefficients with vanishing determinant."""


class NonFiniteSampleError(HoloflowError):
    """A sample used for coefficient extraction overflowed."""


class ParameterDomainError(HoloflowError):
    """Flow or spec parameters outside their documented domain."""


class InversionError(HoloflowError):
    """Newton inversion of a conformal map stalled."""


class DomainEscapeError(HoloflowError):
    """A trajectory or model value left the open disc."""


class StepLimitError(HoloflowError):
    """Adaptive integrator exceeded its step budget."""


class NonConvergenceError(HoloflowError):
    """An iterative estimate failed to settle."""

    def __init__(self, message, tail=None):
        super().__init__(message)
        self.tail = tail


class NotSelfMapError(HoloflowError):
    """Map failed the self-map spot check for its declared domain."""


class UnsupportedSpaceError(HoloflowError):
    """Requested classification is not tabulated for this space."""


class WrongRegimeError(HoloflowError):
    """Operation called outside its parameter regime."""


class TemplateViolationError(HoloflowError):
    """Weight incompatible with the unimodular-symbol template."""


class ClassificationMismatchError(HoloflowError):
    """Threshold classification contradicts the exact supremum."""


class MatrixOverflowError(HoloflowError):
    """Matrix powers exceeded the hard overflow guard."""


class ConformanceError(HoloflowError):
    """Sampled semigroup data does not match its closed form."""

    def __init__(self, message, t=None, z=None):
        super().__init__(message)
        self.t = t
        self.z = z
