"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all library errors."""


class DomainError(ToolkitError):
    """Evaluation point lies outside the function's domain."""


class RangeError(ToolkitError):
    """Requested value lies outside an invertible map's range."""


class DegreeError(ToolkitError):
    """Polynomial degree exceeds the configured bound."""


class UnsupportedError(ToolkitError):
    """No closed form is available for these parameters."""


class SingularError(ToolkitError):
    """Evaluation at a point where the mass vanishes."""


class ConstraintError(ToolkitError):
    """Strict-mode parameter relation violated."""


class ValidationError(ToolkitError):
    """Invalid parameters or configuration."""


class ConfigError(ValidationError):
    """Malformed run configuration text."""


class QuadratureError(ToolkitError):
    """Numerical integration failed to reach the requested tolerance."""


class ConvergenceError(ToolkitError):
    """An iterative numerical procedure exceeded its iteration cap."""
