"""Independent numerical checks of the analytic noise expressions.

Two oracles live here:

* :func:`estimate_noise` draws Gaussian quadrature samples with the
  symmetrized moments of the probe light, runs each sample through the
  kick / drift / kick toy dynamics as plain arithmetic, builds the position
  estimator and averages the squared residual. Only symmetrized moments
  enter ``N^2``, so classical sampling is exact in expectation.
* :func:`estimate_output_coefficients` solves the frequency-domain
  Heisenberg-Langevin equations of the cavity as a 4x4 linear system and
  applies the input-output relations, with no closed forms involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np
from scipy.constants import hbar

from .cavity import CavityParams, Coupling, OutputCoefficients
from .exceptions import InvalidParameter, NotPositiveSemidefinite, SingularSusceptibility
from .squeezing import CorrelatorMatrix, SqueezeParams, single_mode_moments, two_mode_moments
from .toy import COS_THETA_TOL, ToySingleParams, ToyTwoParams

RNG_ALGORITHM = "numpy.random.PCG64 (SeedSequence.spawn streams)"
MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class OracleConfig:
    seed: int = 42
    samples: int = 1_000_000
    streams: int = 8

    def __post_init__(self):
        if self.samples < MIN_SAMPLES:
            raise InvalidParameter(f"need at least {MIN_SAMPLES} samples, got {self.samples}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameter("seed must be a 64-bit unsigned integer")
        if self.streams < 1:
            raise InvalidParameter("streams must be >= 1")


@dataclass(frozen=True)
class OracleEstimate:
    mean: float
    stderr: float
    samples: int
    metadata: dict = field(default_factory=dict, compare=False)

    def agrees_with(self, value: float, sigmas: float = 3.0) -> bool:
        return abs(self.mean - value) <= sigmas * self.stderr


def _sampler(cov: CorrelatorMatrix, psd_tol: float = 1e-14) -> np.ndarray:
    """Factor ``L`` with ``L @ L.T == cov`` after clipping tiny eigenvalues."""
    w, v = np.linalg.eigh(cov.matrix)
    scale = max(1.0, float(np.max(np.abs(w))))
    if np.any(w < -1e-10 * scale):
        raise NotPositiveSemidefinite(
            f"moment matrix over {cov.labels} has eigenvalues {w}; check correlator signs"
        )
    w = np.where(w < psd_tol * scale, 0.0, w)
    return v * np.sqrt(w)


def _stream_sizes(cfg: OracleConfig) -> list[int]:
    base, extra = divmod(cfg.samples, cfg.streams)
    return [base + (i < extra) for i in range(cfg.streams)]


def _run(cov: CorrelatorMatrix, residual_fn, cfg: OracleConfig) -> OracleEstimate:
    factor = _sampler(cov)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.streams)
    sums, sums_sq = [], []
    for size, ss in zip(_stream_sizes(cfg), seeds):
        rng = np.random.Generator(np.random.PCG64(ss))
        draws = rng.standard_normal((size, len(cov.labels))) @ factor.T
        q = dict(zip(cov.labels, draws.T))
        sq_res = residual_fn(q) ** 2
        sums.append(math.fsum(sq_res))
        sums_sq.append(math.fsum(sq_res**2))
    n = cfg.samples
    mean = math.fsum(sums) / n
    var = max(math.fsum(sums_sq) / n - mean**2, 0.0) * n / (n - 1)
    meta = {"rng": RNG_ALGORITHM, "seed": cfg.seed, "samples": n, "streams": cfg.streams}
    return OracleEstimate(mean, math.sqrt(var / n), n, meta)


def _kick_drift_kick(optical: dict, kick, beta: float, x0=0.0, p0=0.0):
    """Classical kick / drift / kick on sampled values.

    ``kick(optical)`` returns the momentum transfer and the per-label
    couplings by which each phase quadrature is shifted by ``-coupling * x``.
    """
    optical = dict(optical)
    x, p = x0, p0
    for step in ("kick", "drift", "kick"):
        if step == "drift":
            x = x + beta * p
            continue
        force, phase_shift = kick(optical)
        for label, coupling in phase_shift.items():
            optical[label] = optical[label] - coupling * x
        p = p - force
    return optical, x, p


def _lossy(optical: dict, ancilla: dict, eta: float) -> dict:
    c, s = math.cos(eta), math.sin(eta)
    return {k: c * v + s * ancilla[k] for k, v in optical.items()}


def _single_residual(params: ToySingleParams):
    z, beta, th, eta = params.zeta, params.beta, params.theta, params.eta
    if abs(math.cos(th)) < COS_THETA_TOL:
        raise InvalidParameter("degenerate readout quadrature")

    def kick(o):
        return z * o["X"], {"Y": z}

    def readout(o):
        return math.cos(th) * o["Y"] + math.sin(th) * o["X"]

    # probe the signal normalization with a unit displacement and no light
    out, _, _ = _kick_drift_kick({"X": 0.0, "Y": 0.0}, kick, beta, x0=1.0)
    signal = readout(out)
    if signal == 0.0:
        raise InvalidParameter("no position signal in the readout")

    def residual(q):
        out, _, _ = _kick_drift_kick({"X": q["X"], "Y": q["Y"]}, kick, beta)
        out = _lossy(out, {"X": q["Xin"], "Y": q["Yin"]}, eta)
        return readout(out) / signal

    return residual


def _two_residual(params: ToyTwoParams):
    z1, z2, beta, th, eta = params.zeta1, params.zeta2, params.beta, params.theta, params.eta
    if abs(math.cos(th)) < COS_THETA_TOL:
        raise InvalidParameter("degenerate readout quadrature")

    def kick(o):
        return z1 * o["X1"] - z2 * o["X2"], {"Y1": z1, "Y2": -z2}

    def readout(o):
        return math.cos(th) * (o["Y1"] - o["Y2"]) + math.sin(th) * (o["X1"] - o["X2"])

    zero = {"X1": 0.0, "Y1": 0.0, "X2": 0.0, "Y2": 0.0}
    out, _, _ = _kick_drift_kick(zero, kick, beta, x0=1.0)
    signal = readout(out)
    if signal == 0.0:
        raise InvalidParameter("no position signal in the readout")

    def residual(q):
        out, _, _ = _kick_drift_kick({k: q[k] for k in zero}, kick, beta)
        anc = {"X1": q["Xin1"], "Y1": q["Yin1"], "X2": q["Xin2"], "Y2": q["Yin2"]}
        return readout(_lossy(out, anc, eta)) / signal

    return residual


def estimate_noise(
    params: ToySingleParams | ToyTwoParams,
    sq: SqueezeParams,
    cfg: OracleConfig = OracleConfig(),
    light: CorrelatorMatrix | None = None,
) -> OracleEstimate:
    """Monte-Carlo estimate of the toy-model ``N^2``.

    ``light`` optionally replaces the moments of the probe light (over the
    signal labels); by default they come from the squeezed state.
    """
    if isinstance(params, ToySingleParams):
        light = light or single_mode_moments(sq).correlator(("X", "Y"))
        cov = light.direct_sum(CorrelatorMatrix.vacuum(("Xin", "Yin")))
        residual = _single_residual(params)
        model = "single"
    elif isinstance(params, ToyTwoParams):
        light = light or two_mode_moments(sq).correlator()
        cov = light.direct_sum(CorrelatorMatrix.vacuum(("Xin1", "Yin1", "Xin2", "Yin2")))
        residual = _two_residual(params)
        model = "two"
    else:
        raise InvalidParameter(f"unsupported model parameters {type(params).__name__}")
    est = _run(cov, residual, cfg)
    est.metadata["model"] = model
    return est


# -- cavity linear-system oracle ----------------------------------------------


def _langevin_system(p: CavityParams, coupling: Coupling, nu: float):
    """``(M, B)`` with ``M z = B u`` for ``z = (X, Y, x, p)``, ``u = (X_in, Y_in, F_in)``."""
    k, g = p.kappa, coupling.value
    a = np.zeros((4, 4))  # dz/dt = a z + b u
    a[0, 0] = -k / 2
    a[1, 1] = -k / 2
    a[2, 3] = 1.0 / p.m
    a[3, 2] = -p.m * p.omega_m**2
    a[3, 3] = -p.gamma
    if coupling.kind == "position":
        a[1, 2] = -g
        a[3, 0] = -hbar * g
    else:
        a[1, 3] = -g
        a[2, 0] = hbar * g
    b = np.zeros((4, 3))
    b[0, 0] = math.sqrt(k)
    b[1, 1] = math.sqrt(k)
    b[3, 2] = 1.0
    return -1j * nu * np.eye(4) - a, b


def _equilibrated_solve(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    # row/column scaling keeps the pivots O(1) across the wildly different units
    r = 1.0 / np.max(np.abs(m), axis=1)
    ms = m * r[:, None]
    c = 1.0 / np.max(np.abs(ms), axis=0)
    ms = ms * c[None, :]
    y = np.linalg.solve(ms, b * r[:, None])
    return y * c[:, None]


def estimate_output_coefficients(p: CavityParams, coupling: Coupling, nu) -> OutputCoefficients:
    """Output quadrature response from a direct solve of the Langevin equations."""
    nus = np.atleast_1d(np.asarray(nu, dtype=float))
    mats = np.empty((2, 3, nus.size), dtype=complex)
    out_map = np.zeros((2, 4))
    out_map[0, 0] = out_map[1, 1] = -math.sqrt(p.kappa)
    direct = np.zeros((2, 3))
    direct[0, 0] = direct[1, 1] = 1.0
    for i, f in enumerate(nus):
        m, b = _langevin_system(p, coupling, f)
        try:
            z = _equilibrated_solve(m, b)
        except np.linalg.LinAlgError:
            raise SingularSusceptibility(f"Langevin system is singular at nu={f!r}") from None
        mats[:, :, i] = direct + out_map @ z
    shape = np.shape(nu)
    return OutputCoefficients(np.asarray(nu, dtype=float), mats.reshape((2, 3) + shape))
