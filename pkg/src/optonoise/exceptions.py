"""Exceptions raised by :mod:`optonoise`."""


class OptonoiseError(Exception):
    """Base class for all package errors."""


class InvalidParameter(OptonoiseError, ValueError):
    """A physical or numerical parameter is outside its valid domain."""


class DegenerateQuadrature(InvalidParameter):
    """The estimator is undefined because ``cos(theta)`` vanishes."""


class ZeroSignal(InvalidParameter):
    """The measured quadrature carries no signal to normalize against."""


class SingularSusceptibility(InvalidParameter):
    """The mechanical response diverges (``gamma == 0`` at ``nu == omega_m``)."""


class NotPositiveSemidefinite(OptonoiseError):
    """A moment matrix failed the positive-semidefinite check."""
