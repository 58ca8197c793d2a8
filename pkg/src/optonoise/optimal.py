"""Optimal readout angle and probe strength, and search-strategy sweeps.

Closed forms are the production path. The golden-section helpers
(:func:`numeric_argmin` and friends) exist to check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.constants import hbar
from scipy.optimize import minimize_scalar

from .cavity import (
    CavityParams,
    SpectrumPoint,
    force_psd_momentum,
    force_psd_position,
    momentum_from_position_coupling,
    susceptibilities,
)
from .exceptions import InvalidParameter
from .squeezing import SqueezeParams
from .toy import ToySingleParams, ToyTwoParams, noise_metric_single, noise_metric_two

# -- toy models -----------------------------------------------------------------


def theta_opt_toy_single(zeta: float, beta: float) -> float:
    """Readout angle cancelling the backaction term at ``phi = 0``."""
    return -math.atan(zeta**2 * beta)


def theta_opt_toy_two(zeta: float, beta: float) -> float:
    """Balanced two-mode analogue of :func:`theta_opt_toy_single`."""
    return -math.atan(2 * zeta**2 * beta)


@dataclass(frozen=True)
class ZetaOptimum:
    """Minimum of ``N^2(zeta) = A / zeta^2 + B zeta^2 + C`` over ``zeta``."""

    zeta: float
    noise: float
    coefficients: tuple[float, float, float]


def optimal_zeta(metric: Callable[[float], float], zeta_scale: float = 1.0) -> ZetaOptimum:
    """Exact minimizer of a toy noise metric at fixed readout angle.

    At fixed ``theta``, ``beta`` and light state the toy ``N^2`` is exactly
    ``A / zeta^2 + B zeta^2 + C`` (shot, backaction and cross terms). The
    three coefficients are recovered from three evaluations around
    ``zeta_scale``; the optimum is ``zeta^2 = sqrt(A / B)`` with noise
    ``2 sqrt(A B) + C``.
    """
    u = zeta_scale**2 * np.array([0.5, 1.0, 2.0])
    values = np.array([metric(math.sqrt(x)) for x in u])
    a, b, c = np.linalg.solve(np.column_stack([1 / u, u, np.ones(3)]), values)
    if a <= 0 or b <= 0:
        raise InvalidParameter("noise metric has no interior minimum in zeta")
    zeta_sq = math.sqrt(a / b)
    return ZetaOptimum(math.sqrt(zeta_sq), 2 * math.sqrt(a * b) + c, (a, b, c))


def optimal_zeta_single(
    beta: float, sq: SqueezeParams = SqueezeParams(), theta: float = 0.0, eta: float = 0.0
) -> ZetaOptimum:
    def metric(z):
        return noise_metric_single(ToySingleParams(z, beta, theta, eta), sq)

    return optimal_zeta(metric, 1 / math.sqrt(beta))


def optimal_zeta_two(
    beta: float,
    sq: SqueezeParams = SqueezeParams(),
    theta: float = 0.0,
    asymmetry: float = 1.0,
    eta: float = 0.0,
) -> ZetaOptimum:
    """Optimum over the mode-1 strength ``zeta1`` with ``zeta2 = asymmetry * zeta1``."""

    def metric(z):
        return noise_metric_two(ToyTwoParams(z, asymmetry * z, beta, theta, eta), sq)

    return optimal_zeta(metric, 1 / math.sqrt(2 * beta))


def zeta_sql(beta: float) -> float:
    """Single-mode interaction strength reaching the SQL (``theta = r = 0``)."""
    return optimal_zeta_single(beta).zeta


# -- cavity: closed forms ---------------------------------------------------------


def theta_opt_position(p: CavityParams, g: float, nu) -> np.ndarray:
    """``arctan(hbar G^2 m |chi_c|^2 |chi_m|^2 (nu^2 - omega_m^2))``."""
    nu = np.asarray(nu, dtype=float)
    s = susceptibilities(p, nu)
    return np.arctan(
        hbar * g**2 * p.m * np.abs(s.chi_c) ** 2 * np.abs(s.chi_m) ** 2 * (nu**2 - p.omega_m**2)
    )


def theta_opt_momentum(p: CavityParams, gp: float, nu) -> np.ndarray:
    """``arctan(hbar G'^2 m^3 omega_m^2 |chi_c|^2 |chi_m|^2 (nu^2 - omega_m^2))``."""
    nu = np.asarray(nu, dtype=float)
    s = susceptibilities(p, nu)
    return np.arctan(
        hbar
        * gp**2
        * p.m**3
        * p.omega_m**2
        * np.abs(s.chi_c) ** 2
        * np.abs(s.chi_m) ** 2
        * (nu**2 - p.omega_m**2)
    )


def g_opt_position(p: CavityParams, nu, r: float = 0.0) -> np.ndarray:
    """Coupling balancing shot and backaction noise in the phase quadrature."""
    s = susceptibilities(p, nu)
    return math.exp(-r) / (math.sqrt(hbar) * np.abs(s.chi_m) ** 0.5 * np.abs(s.chi_c))


def g_opt_momentum(p: CavityParams, nu, r: float = 0.0) -> np.ndarray:
    """Momentum-coupling analogue of :func:`g_opt_position`."""
    if p.omega_m == 0:
        raise InvalidParameter("no finite optimal momentum coupling for a free mass (omega_m = 0)")
    return g_opt_position(p, nu, r) / (p.m * p.omega_m)


def theta_opt(p: CavityParams, kind: str, coupling: float, nu) -> np.ndarray:
    fn = theta_opt_position if kind == "position" else theta_opt_momentum
    return fn(p, coupling, nu)


def g_opt(p: CavityParams, kind: str, nu, r: float = 0.0) -> np.ndarray:
    fn = g_opt_position if kind == "position" else g_opt_momentum
    return fn(p, nu, r)


def _psd(kind: str):
    if kind == "position":
        return force_psd_position
    if kind == "momentum":
        return force_psd_momentum
    raise InvalidParameter(f"unknown coupling kind {kind!r}")


# -- golden-section oracles -------------------------------------------------------


def numeric_argmin(f: Callable[[float], float], lo: float, hi: float, points: int = 2001, tol: float = 1e-10) -> float:
    """Grid scan followed by bracketed golden-section refinement."""
    xs = np.linspace(lo, hi, points)
    fs = np.array([f(x) for x in xs])
    i = int(np.clip(np.argmin(fs), 1, points - 2))
    res = minimize_scalar(f, bracket=(xs[i - 1], xs[i], xs[i + 1]), method="golden", tol=tol)
    return float(res.x)


def numeric_theta_opt(p: CavityParams, kind: str, coupling: float, nu: float, sq: SqueezeParams = SqueezeParams()) -> float:
    psd = _psd(kind)
    edge = 1e-6
    return numeric_argmin(
        lambda th: float(psd(p, coupling, nu, th, sq).total), -math.pi / 2 + edge, math.pi / 2 - edge
    )


def numeric_g_opt(
    p: CavityParams, kind: str, nu: float, sq: SqueezeParams = SqueezeParams(), log_range=(-10.0, 60.0)
) -> float:
    """Coupling minimizing the phase-quadrature noise, searched in ``log(G)``."""
    psd = _psd(kind)
    lo, hi = (v * math.log(10) for v in log_range)
    coarse = numeric_argmin(lambda u: math.log(float(psd(p, math.exp(u), nu, 0.0, sq).total)), lo, hi)
    # refine around the coarse point so the golden tolerance acts on an O(1) variable
    fine = numeric_argmin(
        lambda d: float(psd(p, math.exp(coarse + d), nu, 0.0, sq).total) / float(psd(p, math.exp(coarse), nu, 0.0, sq).total),
        -0.5,
        0.5,
        points=201,
    )
    return math.exp(coarse + fine)


# -- search strategies ------------------------------------------------------------

StrategyMode = Literal["broadband", "narrowband"]
KINDS = ("position", "momentum")


def log_grid(lo: float, hi: float, n: int = 400) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), n)


@dataclass(frozen=True)
class StrategyConfig:
    """Inputs to a search-strategy sweep.

    ``sq`` is the squeezed configuration compared against the coherent
    (``r = 0``) reference at the same probe power. ``power_r`` is the
    squeezing level the optimal coupling is computed for; the default
    ``0`` keeps the power of the unsqueezed optimum for both curves.
    """

    mode: StrategyMode
    cavity: CavityParams
    nu_grid: np.ndarray
    sq: SqueezeParams = SqueezeParams(2.0, 0.0)
    target_nu: float | None = None
    power_r: float = 0.0
    kinds: tuple[str, ...] = KINDS

    def __post_init__(self):
        grid = np.asarray(self.nu_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise InvalidParameter("nu_grid must be a 1-D array with at least two points")
        if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
            raise InvalidParameter("nu_grid must be positive and strictly increasing")
        if self.mode not in ("broadband", "narrowband"):
            raise InvalidParameter(f"unknown strategy mode {self.mode!r}")
        if self.mode == "broadband":
            if self.target_nu is None or not grid[0] <= self.target_nu <= grid[-1]:
                raise InvalidParameter("broadband sweeps need target_nu inside the grid span")
        for k in self.kinds:
            _psd(k)
        object.__setattr__(self, "nu_grid", grid)


@dataclass(frozen=True)
class SweepCurve:
    kind: str
    r: float
    theta: np.ndarray
    coupling: np.ndarray
    spectrum: SpectrumPoint

    @property
    def total(self) -> np.ndarray:
        return self.spectrum.total


@dataclass(frozen=True)
class SweepResult:
    mode: str
    nu: np.ndarray
    curves: list[SweepCurve] = field(default_factory=list)

    def curve(self, kind: str, r: float) -> SweepCurve:
        for c in self.curves:
            if c.kind == kind and math.isclose(c.r, r, abs_tol=1e-15):
                return c
        raise KeyError((kind, r))


def _squeeze_levels(sq: SqueezeParams) -> list[SqueezeParams]:
    levels = [SqueezeParams(0.0, sq.phi)]
    if sq.r != 0.0:
        levels.append(sq)
    return levels


def broadband_sweep(cfg: StrategyConfig) -> SweepResult:
    """Phase-quadrature noise at a fixed power tuned for ``target_nu``.

    The position coupling is the shot/backaction-balanced value at the
    target frequency; the momentum coupling uses the same power,
    ``G' = G / (m kappa)``.
    """
    if cfg.mode != "broadband":
        raise InvalidParameter("configuration is not a broadband sweep")
    p, nu = cfg.cavity, cfg.nu_grid
    g = float(g_opt_position(p, cfg.target_nu, cfg.power_r))
    couplings = {"position": g, "momentum": momentum_from_position_coupling(g, p)}
    theta = np.zeros_like(nu)
    curves = []
    for kind in cfg.kinds:
        for sq in _squeeze_levels(cfg.sq):
            spec = _psd(kind)(p, couplings[kind], nu, theta, sq)
            curves.append(SweepCurve(kind, sq.r, theta, np.full_like(nu, couplings[kind]), spec))
    return SweepResult("broadband", nu, curves)


def narrowband_sweep(cfg: StrategyConfig) -> SweepResult:
    """Per-frequency optimal coupling and optimal readout angle."""
    if cfg.mode != "narrowband":
        raise InvalidParameter("configuration is not a narrowband sweep")
    p, nu = cfg.cavity, cfg.nu_grid
    curves = []
    for kind in cfg.kinds:
        coupling = g_opt(p, kind, nu, cfg.power_r)
        theta = np.arctan(_tan_opt(p, kind, coupling, nu))
        for sq in _squeeze_levels(cfg.sq):
            spec = _psd(kind)(p, coupling, nu, theta, sq)
            curves.append(SweepCurve(kind, sq.r, theta, coupling, spec))
    return SweepResult("narrowband", nu, curves)


def _tan_opt(p: CavityParams, kind: str, coupling: np.ndarray, nu: np.ndarray) -> np.ndarray:
    # theta_opt with an array of couplings, one per frequency
    s = susceptibilities(p, nu)
    base = hbar * coupling**2 * np.abs(s.chi_c) ** 2 * np.abs(s.chi_m) ** 2 * (nu**2 - p.omega_m**2)
    if kind == "position":
        return base * p.m
    return base * p.m**3 * p.omega_m**2


def run_strategy(cfg: StrategyConfig) -> SweepResult:
    return broadband_sweep(cfg) if cfg.mode == "broadband" else narrowband_sweep(cfg)


@dataclass(frozen=True)
class AngleComparison:
    """Optimal readout angles for both couplings at equal power."""

    x: np.ndarray
    theta_position: np.ndarray
    theta_momentum: np.ndarray
    sweep: str


def angle_vs_frequency(p: CavityParams, g: float, nu) -> AngleComparison:
    nu = np.asarray(nu, dtype=float)
    gp = momentum_from_position_coupling(g, p)
    return AngleComparison(nu, theta_opt_position(p, g, nu), theta_opt_momentum(p, gp, nu), "frequency")


def angle_vs_power(p: CavityParams, g_ref: float, nu: float, power_norm: Sequence[float]) -> AngleComparison:
    """Angles at fixed ``nu`` for powers ``G^2 / g_ref^2`` in ``power_norm``."""
    power = np.asarray(power_norm, dtype=float)
    if np.any(power <= 0):
        raise InvalidParameter("normalized powers must be > 0")
    g = g_ref * np.sqrt(power)
    nu_arr = np.full_like(g, nu)
    return AngleComparison(
        power,
        np.arctan(_tan_opt(p, "position", g, nu_arr)),
        np.arctan(_tan_opt(p, "momentum", g / (p.m * p.kappa), nu_arr)),
        "power",
    )
