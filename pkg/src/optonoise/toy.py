"""Pulsed toy models: two position kicks separated by free evolution.

Single mode::

    U_tot = exp(-i zeta x0 X) exp(-i beta p0^2 / 2) exp(-i zeta x0 X)

Two mode (opposite sides of the mirror, optionally unequal drive)::

    U_tot = exp(-i x0 (z1 X1 - z2 X2)) exp(-i beta p0^2 / 2) exp(-i x0 (z1 X1 - z2 X2))

Detection loss mixes each output mode with a vacuum ancilla on a beam
splitter of angle ``eta`` (power loss ``sin(eta)**2``) before homodyne
readout of ``X_theta = cos(theta) Y + sin(theta) X``.

The noise metric ``N^2`` is the variance of the optical part of
``x_E - (x0 + beta p0 / 2)``, where the estimator ``x_E`` is the measured
quadrature divided by its (loss-free) ``x0`` coefficient. Initial
mechanical fluctuations are not part of ``N^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy import constants

from .exceptions import DegenerateQuadrature, InvalidParameter, ZeroSignal
from .operators import AffineMap, OperatorBasis, OperatorVector, beamsplitter_loss, compose
from .squeezing import CorrelatorMatrix, SqueezeParams, single_mode_moments, two_mode_moments

COS_THETA_TOL = 1e-9

SINGLE_BASIS = OperatorBasis(
    pairs=(("X", "Y"), ("x0", "p0"), ("Xin", "Yin")),
    mechanical=(("x0", "p0"),),
)
TWO_BASIS = OperatorBasis(
    pairs=(("X1", "Y1"), ("X2", "Y2"), ("x0", "p0"), ("Xin1", "Yin1"), ("Xin2", "Yin2")),
    mechanical=(("x0", "p0"),),
)


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise InvalidParameter(f"{name} must be finite, got {v!r}")


def _check_eta(eta: float):
    if not 0.0 <= eta <= math.pi / 2:
        raise InvalidParameter(f"loss angle eta must lie in [0, pi/2], got {eta!r}")


@dataclass(frozen=True)
class ToySingleParams:
    """Interaction strength, free-evolution factor, readout angle, loss angle."""

    zeta: float
    beta: float
    theta: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        _check_finite(zeta=self.zeta, beta=self.beta, theta=self.theta, eta=self.eta)
        if self.zeta < 0:
            raise InvalidParameter(f"zeta must be >= 0, got {self.zeta!r}")
        if self.beta <= 0:
            raise InvalidParameter(f"beta must be > 0, got {self.beta!r}")
        _check_eta(self.eta)


@dataclass(frozen=True)
class ToyTwoParams:
    """Two-mode toy parameters; ``zeta1 == zeta2`` is the balanced drive."""

    zeta1: float
    zeta2: float
    beta: float
    theta: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        _check_finite(
            zeta1=self.zeta1, zeta2=self.zeta2, beta=self.beta, theta=self.theta, eta=self.eta
        )
        if self.zeta1 < 0 or self.zeta2 < 0:
            raise InvalidParameter("zeta1 and zeta2 must be >= 0")
        if self.beta <= 0:
            raise InvalidParameter(f"beta must be > 0, got {self.beta!r}")
        _check_eta(self.eta)

    @classmethod
    def symmetric(cls, zeta: float, beta: float, theta: float = 0.0, eta: float = 0.0):
        return cls(zeta, zeta, beta, theta, eta)

    @property
    def asymmetry(self) -> float:
        return self.zeta2 / self.zeta1 if self.zeta1 else math.nan


# -- single mode ---------------------------------------------------------------


def single_mode_map(params: ToySingleParams, include_loss: bool = True) -> AffineMap:
    b = SINGLE_BASIS
    kick = AffineMap.bilinear(b, {"x0": 1.0}, {"X": params.zeta})
    drift = AffineMap.quadratic(b, "p0", params.beta)
    maps = [kick, drift, kick]
    if include_loss:
        maps.insert(0, beamsplitter_loss(b, ("X", "Y"), ("Xin", "Yin"), params.eta))
    return compose(maps)


def evolve_single(params: ToySingleParams) -> dict[str, OperatorVector]:
    """Heisenberg images of every basis operator under ``U_tot`` (no loss).

    >>> out = evolve_single(ToySingleParams(zeta=1.0, beta=1.0))
    >>> out["Y"]
    OperatorVector(+1*X +1*Y -2*x0 -1*p0)
    """
    return single_mode_map(params, include_loss=False).images()


def _quadrature(m: AffineMap, amp: str, phase: str, theta: float) -> OperatorVector:
    return m.image(phase) * math.cos(theta) + m.image(amp) * math.sin(theta)


def measured_quadrature_single(params: ToySingleParams) -> OperatorVector:
    """``X_theta = cos(theta) Y_out + sin(theta) X_out``."""
    return _quadrature(single_mode_map(params), "X", "Y", params.theta)


def _signal_coefficient(quad: OperatorVector, theta: float) -> float:
    if abs(math.cos(theta)) < COS_THETA_TOL:
        raise DegenerateQuadrature(
            f"|cos(theta)| < {COS_THETA_TOL:g} at theta={theta!r}: the amplitude "
            "quadrature carries no position signal"
        )
    c = quad["x0"]
    if c == 0.0:
        raise ZeroSignal("measured quadrature has no x0 component (zero coupling)")
    return c


def position_estimator_single(params: ToySingleParams) -> OperatorVector:
    """Measured quadrature normalized so that the ``x0`` coefficient is one.

    Loss does not change the normalization; it only adds ancilla noise and
    scales the transmitted terms by ``cos(eta)``.
    """
    lossless = _quadrature(single_mode_map(params, include_loss=False), "X", "Y", params.theta)
    c = _signal_coefficient(lossless, params.theta)
    return measured_quadrature_single(params) / c


def _residual(estimator: OperatorVector, beta: float) -> OperatorVector:
    b = estimator.basis
    return estimator - (b.unit("x0") + b.unit("p0") * (beta / 2))


def noise_metric_single(
    params: ToySingleParams, sq: SqueezeParams, light: CorrelatorMatrix | None = None
) -> float:
    """Measurement-induced noise ``N^2`` of the single-mode toy model.

    ``light`` replaces the squeezed-vacuum moments over ``(X, Y)`` when given.

    >>> noise_metric_single(ToySingleParams(zeta=1.0, beta=1.0), SqueezeParams())
    0.25
    """
    residual = _residual(position_estimator_single(params), params.beta)
    if light is None:
        light = single_mode_moments(sq).correlator(("X", "Y"))
    moments = light.direct_sum(CorrelatorMatrix.vacuum(("Xin", "Yin")))
    return moments.quadratic_form(residual.optical_part())


def noise_metric_single_lossy(params: ToySingleParams, sq: SqueezeParams, eta: float | None = None) -> float:
    """``N^2`` with detection loss; ``eta`` overrides ``params.eta`` if given."""
    if eta is not None:
        params = replace(params, eta=eta)
    return noise_metric_single(params, sq)


# -- two mode ------------------------------------------------------------------


def two_mode_map(params: ToyTwoParams, include_loss: bool = True) -> AffineMap:
    b = TWO_BASIS
    kick = AffineMap.bilinear(b, {"x0": 1.0}, {"X1": params.zeta1, "X2": -params.zeta2})
    drift = AffineMap.quadratic(b, "p0", params.beta)
    maps = [kick, drift, kick]
    if include_loss:
        maps.insert(0, beamsplitter_loss(b, ("X1", "Y1"), ("Xin1", "Yin1"), params.eta))
        maps.insert(0, beamsplitter_loss(b, ("X2", "Y2"), ("Xin2", "Yin2"), params.eta))
    return compose(maps)


def evolve_two(params: ToyTwoParams) -> dict[str, OperatorVector]:
    """Heisenberg images of every basis operator (no loss)."""
    return two_mode_map(params, include_loss=False).images()


def _difference_quadrature(m: AffineMap, theta: float) -> OperatorVector:
    dy = m.image("Y1") - m.image("Y2")
    dx = m.image("X1") - m.image("X2")
    return dy * math.cos(theta) + dx * math.sin(theta)


def measured_quadrature_two(params: ToyTwoParams) -> OperatorVector:
    """``cos(theta) (Y1 - Y2) + sin(theta) (X1 - X2)`` at the detectors."""
    return _difference_quadrature(two_mode_map(params), params.theta)


def position_estimator_two(params: ToyTwoParams) -> OperatorVector:
    # the x0 coefficient is -2 (zeta1 + zeta2) cos(theta) for any asymmetry
    lossless = _difference_quadrature(two_mode_map(params, include_loss=False), params.theta)
    c = _signal_coefficient(lossless, params.theta)
    return measured_quadrature_two(params) / c


def noise_metric_two(
    params: ToyTwoParams, sq: SqueezeParams, light: CorrelatorMatrix | None = None
) -> float:
    """``N^2`` of the two-mode toy model over the two-mode squeezed state.

    ``light`` replaces the moments over ``(X1, Y1, X2, Y2)`` when given.
    """
    residual = _residual(position_estimator_two(params), params.beta)
    if light is None:
        light = two_mode_moments(sq).correlator()
    moments = light.direct_sum(CorrelatorMatrix.vacuum(("Xin1", "Yin1", "Xin2", "Yin2")))
    return moments.quadratic_form(residual.optical_part())


# -- physical parameter helpers -----------------------------------------------


def zeta_from_physical(alpha: float, g: float, kappa: float) -> float:
    """Interaction strength ``zeta = alpha * g / kappa``.

    ``alpha`` is the (real) displacement amplitude, ``g`` the single-photon
    coupling and ``kappa`` the linewidth, both in the same frequency unit.
    """
    _check_finite(alpha=alpha, g=g, kappa=kappa)
    if alpha < 0 or g <= 0:
        raise InvalidParameter("alpha must be >= 0 and g > 0")
    if kappa <= 0:
        raise InvalidParameter(f"kappa must be > 0, got {kappa!r}")
    return alpha * g / kappa


def beta_from_physical(t: float, m: float, temperature: float) -> float:
    """Free-evolution factor ``hbar t / (m lambda^2)`` for a free mass.

    With the thermal length ``lambda^2 = hbar^2 / (2 m k_B T)`` the mass
    cancels and ``beta = 2 k_B T t / hbar``.
    """
    _check_finite(t=t, m=m, temperature=temperature)
    if t <= 0 or m <= 0 or temperature <= 0:
        raise InvalidParameter("t, m and temperature must all be > 0")
    thermal_length_sq = constants.hbar**2 / (2 * m * constants.k * temperature)
    return constants.hbar * t / (m * thermal_length_sq)


@dataclass(frozen=True)
class LinearizationCheck:
    n: float
    n_vac: float
    ratio: float
    passed: bool
    by_convention: bool = False


def linearization_check(alpha: float, sq: SqueezeParams, margin: float = 100.0) -> LinearizationCheck:
    """Compare the coherent photon number ``alpha**2`` with ``sinh(r)**2``.

    The linearized interaction needs ``n >> n_vac``; ``passed`` means
    ``n >= margin * n_vac``. With no squeezed photons the ratio is undefined
    and the check passes by convention (``by_convention`` is set).
    """
    _check_finite(alpha=alpha)
    if alpha < 0:
        raise InvalidParameter(f"alpha must be >= 0, got {alpha!r}")
    n = alpha**2
    n_vac = sq.vacuum_photons
    if n_vac == 0.0:
        return LinearizationCheck(n, 0.0, math.inf if n > 0 else math.nan, True, by_convention=True)
    ratio = n / n_vac
    return LinearizationCheck(n, n_vac, ratio, ratio >= margin)
