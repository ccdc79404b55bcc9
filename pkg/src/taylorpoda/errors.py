"""Exception hierarchy for the attribution engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class ParseError(EngineError):
    """Malformed model file, CSV, or wire message."""


class DimensionError(EngineError):
    """Inconsistent shapes between model, inputs, or background."""


class UnsupportedActivation(EngineError):
    """Activation name outside the supported set."""


class OracleError(EngineError):
    """External oracle process failure, timeout, or protocol violation."""


class NonFiniteInput(EngineError):
    """Input row contains NaN or Inf."""


class NonFiniteOutput(EngineError):
    """Model produced NaN or Inf."""


class EnumerationGuard(EngineError):
    """Coalition enumeration would exceed the configured ceiling."""


class MissingCoalition(EngineError):
    """A required coalition is not stored in the value table."""


class NotPolynomial(EngineError):
    """Operation requires a polynomial model."""


class BackgroundNotSingleRow(EngineError):
    """Operation requires a single-row background (an explicit baseline)."""


class InvalidAllocation(EngineError):
    """Interaction-allocation weights violate the simplex constraint or are incomplete."""


class InvalidAlpha(EngineError):
    """Dirichlet concentration parameters must be positive and finite."""


class SingularFit(EngineError):
    """Surrogate regression failed to produce finite coefficients."""


class EmptyFamilyList(EngineError):
    """At least one weight family is required."""


class DegenerateLabels(EngineError):
    """Binary-label metric needs at least one positive and one negative sample."""


class InsufficientSamples(EngineError):
    """Aggregation needs at least two values."""


class ConfigError(EngineError):
    """Invalid run configuration."""
