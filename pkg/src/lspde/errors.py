"""Exception types shared across the package."""


class LspdeError(Exception):
    """Base class for all domain errors raised by this package."""


class DivergentIntegral(LspdeError):
    """A quadrature detected a non-integrable density where finiteness is required."""


class InvalidDelta(LspdeError):
    """Jump truncation level outside (0, 1]."""


class Unbounded(LspdeError):
    """The sublevel set of a weight function is unbounded at the requested level."""


class DimensionMismatch(LspdeError):
    """Vector length does not match the polynomial/grid dimension."""


class ZeroOnAxis(LspdeError):
    """Denominator polynomial (numerically) vanishes at a sampled frequency."""

    def __init__(self, frequency, modulus):
        self.frequency = tuple(float(c) for c in frequency)
        self.modulus = float(modulus)
        super().__init__(
            f"symbol denominator has modulus {self.modulus:.3e} at frequency {self.frequency}"
        )


class FitFailed(LspdeError):
    """Log-log decay fit rejected: the symbol is not of pure power decay."""


class DomainTagMismatch(LspdeError):
    """Field passed in the wrong domain (physical vs spectral)."""


class InvalidR(LspdeError):
    """Integrability exponent must be positive (possibly infinite)."""


class MalformedHeader(LspdeError):
    """Field file header missing, truncated or inconsistent."""


class ShapeMismatch(LspdeError):
    """Field file payload does not match the shape declared in its header."""


class PreconditionViolated(LspdeError):
    """Arguments violate a stated precondition."""


class NotAContraction(LspdeError):
    """Estimated contraction ratio is >= 1, or observed iterates stopped contracting."""

    def __init__(self, message, ratio=None, observed=None):
        self.ratio = ratio
        self.observed = observed
        super().__init__(message)


class MaxIterExceeded(LspdeError):
    """Picard iteration hit the iteration budget before reaching tolerance."""

    def __init__(self, message, increments=None):
        self.increments = list(increments) if increments is not None else []
        super().__init__(message)


class BlockTruncatedWarning(UserWarning):
    """A dyadic block extends past the grid's Nyquist radius; its norm is truncated."""
