"""Measurement-induced force noise of a resonantly driven single-sided cavity.

Two linearized couplings of the optical amplitude quadrature ``X`` to the
mirror are supported:

* ``position``: ``H_int = hbar G x X`` (``G`` in rad/s per metre);
* ``momentum``: ``H_int = hbar G' p X`` (``G'`` in rad/s per kg m/s).

Frequencies (``nu``, ``omega_m``, ``kappa``, ``gamma``) are angular, in
rad/s, with Fourier convention ``d/dt -> -i nu``. Every function accepts
scalar or array ``nu`` and broadcasts.

The force estimator divides the homodyne quadrature
``X_theta = cos(theta) Y_out + sin(theta) X_out`` by its ``F_in``
coefficient. Its symmetrized spectral density splits into a shot term
(``<Y_in^2>``), a backaction term (``<X_in^2>``) and a cross term
(``<{X_in, Y_in}>``); the thermal force ``<F_in^2>`` is carried as an
opaque constant and is not part of ``total``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.constants import hbar

from .exceptions import DegenerateQuadrature, InvalidParameter, SingularSusceptibility
from .squeezing import SqueezeParams, single_mode_moments

CouplingKind = Literal["position", "momentum"]
COS_THETA_TOL = 1e-9
WEAK_DAMPING_RATIO = 1e-2


@dataclass(frozen=True)
class CavityParams:
    """Mirror mass (kg) and angular rates (rad/s); the drive is on resonance."""

    m: float
    omega_m: float
    kappa: float
    gamma: float
    delta: float = 0.0

    def __post_init__(self):
        for name in ("m", "omega_m", "kappa", "gamma", "delta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidParameter(f"{name} must be finite, got {v!r}")
        if self.m <= 0 or self.kappa <= 0:
            raise InvalidParameter("m and kappa must be > 0")
        if self.omega_m < 0 or self.gamma < 0:
            raise InvalidParameter("omega_m and gamma must be >= 0")
        if self.delta != 0.0:
            raise InvalidParameter("only the resonant drive (delta = 0) is supported")
        if self.gamma > WEAK_DAMPING_RATIO * min(self.omega_m or math.inf, self.kappa):
            warnings.warn(
                f"gamma={self.gamma:g} is not much smaller than omega_m and kappa; "
                "closed-form optima assume weak mechanical damping",
                stacklevel=3,
            )


@dataclass(frozen=True)
class Coupling:
    kind: CouplingKind
    value: float

    def __post_init__(self):
        if self.kind not in ("position", "momentum"):
            raise InvalidParameter(f"unknown coupling kind {self.kind!r}")
        if not (math.isfinite(self.value) and self.value > 0):
            raise InvalidParameter(f"coupling must be finite and > 0, got {self.value!r}")

    def to_momentum(self, p: CavityParams) -> "Coupling":
        """Equal-power momentum coupling ``G' = G / (m kappa)``."""
        if self.kind == "momentum":
            return self
        return Coupling("momentum", momentum_from_position_coupling(self.value, p))


def momentum_from_position_coupling(g: float, p: CavityParams) -> float:
    return g / (p.m * p.kappa)


@dataclass(frozen=True)
class Susceptibilities:
    chi_c: np.ndarray
    chi_m: np.ndarray
    phase: np.ndarray


def _nu(nu) -> np.ndarray:
    arr = np.asarray(nu, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidParameter("frequencies must be finite")
    return arr


def susceptibilities(p: CavityParams, nu) -> Susceptibilities:
    """Cavity response, mechanical response and cavity phase factor.

    ``chi_c = sqrt(kappa) / (-i nu + kappa/2)``,
    ``chi_m = -1 / (m (nu^2 - omega_m^2 + i gamma nu))``,
    ``exp(i phi_c) = (-i nu - kappa/2) / (-i nu + kappa/2)``.
    """
    nu = _nu(nu)
    denom_m = nu**2 - p.omega_m**2 + 1j * p.gamma * nu
    if np.any(denom_m == 0):
        raise SingularSusceptibility(
            "mechanical susceptibility diverges (gamma = 0 at nu = omega_m, or nu = omega_m = 0)"
        )
    cav = -1j * nu + p.kappa / 2
    return Susceptibilities(
        chi_c=np.sqrt(p.kappa) / cav,
        chi_m=-1.0 / (p.m * denom_m),
        phase=(-1j * nu - p.kappa / 2) / cav,
    )


@dataclass(frozen=True)
class OutputCoefficients:
    """Linear response of ``(X_out, Y_out)`` to ``(X_in, Y_in, F_in)``.

    ``matrix`` has shape ``(2, 3) + nu.shape``; rows are outputs, columns
    inputs in the order above.
    """

    nu: np.ndarray
    matrix: np.ndarray

    OUTPUTS = ("X_out", "Y_out")
    INPUTS = ("X_in", "Y_in", "F_in")

    def __getitem__(self, pair: tuple[str, str]) -> np.ndarray:
        out, inp = pair
        return self.matrix[self.OUTPUTS.index(out), self.INPUTS.index(inp)]


def _pack(nu, x_out, y_out) -> OutputCoefficients:
    nu = np.asarray(nu, dtype=float)
    rows = [np.broadcast_to(np.asarray(c, dtype=complex), nu.shape) for c in (*x_out, *y_out)]
    return OutputCoefficients(nu, np.array(rows).reshape((2, 3) + nu.shape))


def output_quadratures_position(p: CavityParams, g: float, nu) -> OutputCoefficients:
    """``X_out = e^{i phi_c} X_in``;
    ``Y_out = e^{i phi_c} Y_in + G chi_c chi_m (F_in - hbar G chi_c X_in)``."""
    s = susceptibilities(p, nu)
    zero = np.zeros_like(s.chi_c)
    x_out = (s.phase, zero, zero)
    y_out = (-hbar * g**2 * s.chi_c**2 * s.chi_m, s.phase, g * s.chi_c * s.chi_m)
    return _pack(nu, x_out, y_out)


def output_quadratures_momentum(p: CavityParams, gp: float, nu) -> OutputCoefficients:
    """``Y_out = e^{i phi_c} Y_in - i G' chi_c chi_m m nu F_in
    - hbar m^2 omega_m^2 G'^2 chi_c^2 chi_m X_in``."""
    s = susceptibilities(p, nu)
    nu = _nu(nu)
    zero = np.zeros_like(s.chi_c)
    x_out = (s.phase, zero, zero)
    y_out = (
        -hbar * p.m**2 * p.omega_m**2 * gp**2 * s.chi_c**2 * s.chi_m,
        s.phase,
        -1j * gp * s.chi_c * s.chi_m * p.m * nu,
    )
    return _pack(nu, x_out, y_out)


@dataclass(frozen=True)
class SpectrumPoint:
    """Decomposition of the measurement-induced force PSD at each ``nu``.

    Fields broadcast with ``nu``. ``total = shot + backaction + cross``;
    the thermal input ``thermal`` (``<F_in^2>``) is reported separately.
    """

    nu: np.ndarray
    shot: np.ndarray
    backaction: np.ndarray
    cross: np.ndarray
    theta: np.ndarray
    sq: SqueezeParams
    thermal: float = 0.0

    @property
    def total(self) -> np.ndarray:
        return self.shot + self.backaction + self.cross

    @property
    def total_with_thermal(self) -> np.ndarray:
        return self.total + self.thermal


def _tan_theta(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(np.cos(theta)) < COS_THETA_TOL):
        raise DegenerateQuadrature("|cos(theta)| < 1e-9: the force estimator is undefined")
    return np.tan(theta)


def force_psd_position(
    p: CavityParams, g: float, nu, theta, sq: SqueezeParams, thermal: float = 0.0
) -> SpectrumPoint:
    """Force-noise PSD for position coupling ``G`` read out at angle ``theta``."""
    nu = _nu(nu)
    t = _tan_theta(theta)
    s = susceptibilities(p, nu)
    mom = single_mode_moments(sq)
    inv_signal = 1.0 / (g * s.chi_c * s.chi_m)
    shot_gain = np.abs(inv_signal) ** 2
    shot = shot_gain * mom.yy
    back = np.abs(s.phase * t * inv_signal - g * hbar * s.chi_c) ** 2 * mom.xx
    cross = (hbar * p.m * (p.omega_m**2 - nu**2) + t * shot_gain) * mom.xy_anti
    return SpectrumPoint(nu, shot, back, cross, np.broadcast_to(np.asarray(theta, float), nu.shape), sq, thermal)


def force_psd_momentum(
    p: CavityParams, gp: float, nu, theta, sq: SqueezeParams, thermal: float = 0.0
) -> SpectrumPoint:
    """Force-noise PSD for momentum coupling ``G'`` read out at angle ``theta``."""
    nu = _nu(nu)
    if np.any(nu == 0):
        raise InvalidParameter("momentum readout carries no force signal at nu = 0")
    t = _tan_theta(theta)
    s = susceptibilities(p, nu)
    mom = single_mode_moments(sq)
    inv_signal = 1.0 / (gp * p.m * nu * s.chi_c * s.chi_m)
    shot_gain = np.abs(inv_signal) ** 2
    shot = shot_gain * mom.yy
    back = np.abs(
        1j * s.phase * t * inv_signal - 1j * gp * hbar * s.chi_c * p.m * p.omega_m**2 / nu
    ) ** 2 * mom.xx
    cross = (
        hbar * p.m * (p.omega_m**2 / nu**2) * (p.omega_m**2 - nu**2) + t * shot_gain
    ) * mom.xy_anti
    return SpectrumPoint(nu, shot, back, cross, np.broadcast_to(np.asarray(theta, float), nu.shape), sq, thermal)


def force_psd(p: CavityParams, coupling: Coupling, nu, theta, sq: SqueezeParams, thermal: float = 0.0) -> SpectrumPoint:
    fn = force_psd_position if coupling.kind == "position" else force_psd_momentum
    return fn(p, coupling.value, nu, theta, sq, thermal)


def output_quadratures(p: CavityParams, coupling: Coupling, nu) -> OutputCoefficients:
    fn = output_quadratures_position if coupling.kind == "position" else output_quadratures_momentum
    return fn(p, coupling.value, nu)


def spectrum_from_outputs(out: OutputCoefficients, theta, sq: SqueezeParams, thermal: float = 0.0) -> SpectrumPoint:
    """PSD decomposition from arbitrary output coefficients.

    Builds the estimator ``X_theta / (F_in coefficient)`` and keeps only the
    symmetrized part of the ``X_in``-``Y_in`` correlation, so the cross term
    is ``Re(a_X conj(a_Y)) <{X_in, Y_in}>``.
    """
    _tan_theta(theta)
    c, s_ = np.cos(theta), np.sin(theta)
    quad = out.matrix[1] * c + out.matrix[0] * s_
    signal = quad[2]
    if np.any(signal == 0):
        raise InvalidParameter("no force signal in the measured quadrature")
    a_x, a_y = quad[0] / signal, quad[1] / signal
    mom = single_mode_moments(sq)
    theta_arr = np.broadcast_to(np.asarray(theta, float), out.nu.shape)
    return SpectrumPoint(
        out.nu,
        np.abs(a_y) ** 2 * mom.yy,
        np.abs(a_x) ** 2 * mom.xx,
        np.real(a_x * np.conj(a_y)) * mom.xy_anti,
        theta_arr,
        sq,
        thermal,
    )
