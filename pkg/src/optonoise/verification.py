"""Agreement suites pairing analytic results with the independent oracles."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .cavity import CavityParams, Coupling, output_quadratures
from .oracle import OracleConfig, estimate_noise, estimate_output_coefficients
from .squeezing import CorrelatorMatrix, SqueezeParams, single_mode_moments, two_mode_moments
from .toy import ToySingleParams, ToyTwoParams, noise_metric_single, noise_metric_two

FAULTS = ("cross-sign",)


@dataclass(frozen=True)
class ToyCase:
    params: ToySingleParams | ToyTwoParams
    sq: SqueezeParams

    @property
    def model(self) -> str:
        return "single" if isinstance(self.params, ToySingleParams) else "two"

    def describe(self) -> dict:
        return {"model": self.model, **asdict(self.params), "r": self.sq.r, "phi": self.sq.phi}


def random_toy_cases(seed: int, count: int = 50) -> list[ToyCase]:
    """Alternating single- and two-mode draws, with loss and drive asymmetry."""
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(count):
        zeta = rng.uniform(0.2, 3.0)
        beta = rng.uniform(0.2, 5.0)
        theta = rng.uniform(-1.2, 1.2)
        eta = math.asin(math.sqrt(rng.uniform(0.0, 0.5)))
        sq = SqueezeParams(rng.uniform(0.0, 2.0), rng.uniform(-math.pi, math.pi))
        if i % 2 == 0:
            params = ToySingleParams(zeta, beta, theta, eta)
        else:
            params = ToyTwoParams(zeta, zeta * rng.uniform(0.7, 1.0), beta, theta, eta)
        cases.append(ToyCase(params, sq))
    return cases


def _flip_cross(light: CorrelatorMatrix, pairs) -> CorrelatorMatrix:
    m = light.matrix.copy()
    for a, b in pairs:
        i, j = light.index(a), light.index(b)
        m[i, j] = m[j, i] = -m[i, j]
    return CorrelatorMatrix(light.labels, m)


def analytic_noise(case: ToyCase, fault: str | None = None) -> float:
    if fault not in (None, *FAULTS):
        raise ValueError(f"unknown fault {fault!r}")
    if case.model == "single":
        light = single_mode_moments(case.sq).correlator(("X", "Y"))
        if fault:
            light = _flip_cross(light, [("X", "Y")])
        return noise_metric_single(case.params, case.sq, light)
    light = two_mode_moments(case.sq).correlator()
    if fault:
        light = _flip_cross(light, [("X1", "Y2"), ("X2", "Y1")])
    return noise_metric_two(case.params, case.sq, light)


@dataclass
class SuiteReport:
    name: str
    checks: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def summary(self) -> dict:
        failed = [c for c in self.checks if not c["passed"]]
        return {
            "suite": self.name,
            "passed": self.passed,
            "total": len(self.checks),
            "failures": len(failed),
            "failed_checks": failed,
        }


def toy_agreement_suite(
    seed: int = 42,
    samples: int = 1_000_000,
    count: int = 50,
    sigmas: float = 3.0,
    fault: str | None = None,
) -> SuiteReport:
    """Analytic ``N^2`` against the Monte-Carlo oracle; case ``i`` uses seed ``seed + i``."""
    report = SuiteReport("toy-monte-carlo")
    for i, case in enumerate(random_toy_cases(seed, count)):
        est = estimate_noise(case.params, case.sq, OracleConfig(seed=seed + i, samples=samples))
        value = analytic_noise(case, fault)
        report.checks.append(
            {
                "case": i,
                **case.describe(),
                "analytic": value,
                "mean": est.mean,
                "stderr": est.stderr,
                "z": (est.mean - value) / est.stderr,
                "passed": est.agrees_with(value, sigmas),
            }
        )
    return report


PRESET_CAVITY = CavityParams(m=1e-6, omega_m=100.0, kappa=1e6, gamma=1e-4)


def solver_suite(p: CavityParams = PRESET_CAVITY, rtol: float = 1e-10, points: int = 20) -> SuiteReport:
    """Closed-form output coefficients against the direct Langevin solve.

    ``points`` pairs of ``(nu, G)`` are taken along log grids; the momentum
    coupling at each point is the equal-power ``G / (m kappa)``.
    """
    report = SuiteReport("cavity-linear-solver")
    nus = np.logspace(0, 7, points)
    gs = np.logspace(18, 22, points)
    for nu, g in zip(nus, gs):
        for coupling in (Coupling("position", g), Coupling("position", g).to_momentum(p)):
            closed = output_quadratures(p, coupling, nu).matrix
            solved = estimate_output_coefficients(p, coupling, nu).matrix
            scale = np.maximum(np.abs(closed), np.abs(solved))
            err = np.where(scale > 0, np.abs(closed - solved) / np.where(scale > 0, scale, 1), 0.0)
            worst = float(err.max())
            report.checks.append(
                {
                    "kind": coupling.kind,
                    "nu": float(nu),
                    "coupling": coupling.value,
                    "max_rel_err": worst,
                    "passed": worst <= rtol,
                }
            )
    return report
