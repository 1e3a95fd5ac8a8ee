"""Exception types raised across the package."""


class PlanarSpinError(Exception):
    """Base class for all domain errors."""


class SuperluminalVelocity(PlanarSpinError):
    pass


class StepUnderflow(PlanarSpinError):
    pass


class NegativeRadicand(PlanarSpinError):
    pass


class DerivativeNoise(PlanarSpinError):
    """Richardson estimates of a finite difference disagree beyond tolerance."""


class SingularA(PlanarSpinError):
    pass


class DegenerateDenominator(PlanarSpinError):
    pass


class NewtonDivergence(PlanarSpinError):
    pass


class SingularJacobian(PlanarSpinError):
    pass


class NotSkew(PlanarSpinError):
    pass


class ZeroSpin(PlanarSpinError):
    pass


class ZeroMu(PlanarSpinError):
    pass


class ConfigError(PlanarSpinError):
    """Invalid run configuration."""
