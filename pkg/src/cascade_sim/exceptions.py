#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#
#  See the README.md in the repository for more info
#
"""cascade-sim exceptions"""


class CascadeSimError(Exception):
    """Base for all errors raised by this package"""

    def __init__(self, message="cascade-sim failure"):
        self.message = message
        super().__init__(self.message)


class InvalidParameterError(CascadeSimError, ValueError):
    """A rate, tolerance, detector setting or state is out of range"""

    def __init__(self, message="Invalid parameter"):
        super().__init__(message)


class ConfigError(CascadeSimError):
    """JSON parameter document could not be used, message starts with key path"""

    def __init__(self, message="Invalid configuration"):
        super().__init__(message)


class IntegrationError(CascadeSimError):
    """ODE solver gave up before reaching the end of the span"""

    def __init__(self, message="Integration failed", t_reached=None):
        self.t_reached = t_reached
        super().__init__(message)


class SpanError(CascadeSimError, ValueError):
    """Dense output was asked for a time outside the integrated span"""

    def __init__(self, message="Time outside integrated span"):
        super().__init__(message)


class DivergenceError(CascadeSimError):
    """Infinite-horizon quantity for parameters that never decay"""

    def __init__(self, message="No dissipation, quantity diverges"):
        super().__init__(message)


class UndefinedModeError(CascadeSimError):
    """Mode function asked for when no photon reaches the detector"""

    def __init__(self, message="p_rad(inf) is zero, mode function undefined"):
        super().__init__(message)


class ShapeError(CascadeSimError, ValueError):
    """Series or grids that should match do not"""

    def __init__(self, message="Mismatched series"):
        super().__init__(message)


class SamplingError(CascadeSimError):
    """Jump-time bisection did not converge"""

    def __init__(self, message="Jump time bisection did not converge"):
        super().__init__(message)
