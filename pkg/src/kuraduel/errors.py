"""Exception hierarchy.

Everything raised on purpose by the package derives from ``KuraduelError``;
most classes also derive from the builtin that best describes them so callers
can catch ``ValueError`` etc. without importing this module.
"""


class KuraduelError(Exception):
    pass


class GraphSizeError(KuraduelError, ValueError):
    pass


class ConnectivityError(KuraduelError, RuntimeError):
    """Random graph resampling hit the retry cap without a connected draw."""


class DimensionError(KuraduelError, ValueError):
    pass


class DegeneratePartitionError(KuraduelError, ValueError):
    pass


class EdgeListParseError(KuraduelError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DivergenceError(KuraduelError, ArithmeticError):
    def __init__(self, t):
        self.t = t
        super().__init__(f"non-finite state encountered at t={t:.6g}")


class ConvergenceError(KuraduelError, ArithmeticError):
    """QR iteration did not converge within the iteration cap."""


class DegenerateSpectrumError(KuraduelError, ValueError):
    pass


class NoInteractionError(KuraduelError, ValueError):
    """C and S (or C1 and S1) both vanish: the centroid angle is undetermined."""


class DegenerateParameterizationError(KuraduelError, ValueError):
    """The closed-form alpha(t) has a vanishing denominator; integrate the ODE instead."""


class BracketError(KuraduelError, ValueError):
    pass


class InfeasibleError(KuraduelError, ValueError):
    """No stable real steady state anywhere on the scanned grid."""


class ConfigError(KuraduelError, ValueError):
    pass


class ChecksumError(KuraduelError, ValueError):
    pass


class DegenerateCouplingError(KuraduelError, ZeroDivisionError):
    """sigma_R * d_T^(R1R2) vanishes, so chi2, C2 and S2 are undefined."""
