"""Second moments of single-mode and two-mode squeezed vacuum.

Conventions used throughout the package:

* vacuum quadrature variance is 1/2, i.e. ``<X^2> = <Y^2> = 1/2`` at ``r = 0``;
* anticommutator moments are stored in full, ``<{X, Y}> = <XY + YX>``,
  so the symmetrized covariance entry is half of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .exceptions import InvalidParameter, NotPositiveSemidefinite

VACUUM_VARIANCE = 0.5


def _canonical_angle(phi: float) -> float:
    """Map an angle onto (-pi, pi]."""
    wrapped = math.remainder(phi, 2.0 * math.pi)
    if wrapped == -math.pi:
        wrapped = math.pi
    return wrapped


@dataclass(frozen=True)
class SqueezeParams:
    """Squeezing strength ``r >= 0`` and squeezing angle ``phi`` (radians)."""

    r: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        r = float(self.r)
        phi = float(self.phi)
        if not math.isfinite(r) or r < 0:
            raise InvalidParameter(f"squeezing strength must be finite and >= 0, got {self.r!r}")
        if not math.isfinite(phi):
            raise InvalidParameter(f"squeezing angle must be finite, got {self.phi!r}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "phi", _canonical_angle(phi))

    @property
    def vacuum_photons(self) -> float:
        """Mean photon number of the squeezed vacuum, ``sinh(r)**2``."""
        return math.sinh(self.r) ** 2


@dataclass(frozen=True)
class CorrelatorMatrix:
    """Symmetrized second moments ``<{A, B}>/2`` over labeled operators."""

    labels: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise InvalidParameter(f"duplicate labels in {labels}")
        matrix = np.array(self.matrix, dtype=float)
        if matrix.shape != (len(labels), len(labels)):
            raise InvalidParameter(
                f"matrix shape {matrix.shape} does not match {len(labels)} labels"
            )
        if not np.allclose(matrix, matrix.T, rtol=1e-12, atol=0.0):
            raise InvalidParameter("correlator matrix must be symmetric")
        matrix.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def vacuum(cls, labels: Sequence[str]) -> "CorrelatorMatrix":
        return cls(tuple(labels), VACUUM_VARIANCE * np.eye(len(labels)))

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def __getitem__(self, pair: tuple[str, str]) -> float:
        a, b = pair
        return float(self.matrix[self.index(a), self.index(b)])

    def direct_sum(self, other: "CorrelatorMatrix") -> "CorrelatorMatrix":
        """Moments of two uncorrelated subsystems."""
        n, k = len(self.labels), len(other.labels)
        out = np.zeros((n + k, n + k))
        out[:n, :n] = self.matrix
        out[n:, n:] = other.matrix
        return CorrelatorMatrix(self.labels + other.labels, out)

    def relabel(self, mapping: Mapping[str, str]) -> "CorrelatorMatrix":
        return CorrelatorMatrix(tuple(mapping.get(l, l) for l in self.labels), self.matrix)

    def quadratic_form(self, coefficients: Mapping[str, float]) -> float:
        """Expectation of ``(sum_j c_j q_j)**2`` for real coefficients.

        Only symmetrized moments enter, so this is the variance of the
        Hermitian combination. Labels not covered by this matrix raise.
        """
        missing = [l for l, c in coefficients.items() if c != 0.0 and l not in self.labels]
        if missing:
            raise InvalidParameter(f"no moments available for {missing}")
        v = np.array([coefficients.get(l, 0.0) for l in self.labels], dtype=float)
        return float(v @ self.matrix @ v)

    def check_psd(self, tol: float = 1e-14) -> np.ndarray:
        """Return eigenvalues, clipped to zero below ``tol`` (relative).

        Raises :class:`NotPositiveSemidefinite` for clearly negative ones.
        """
        w = np.linalg.eigvalsh(self.matrix)
        scale = max(1.0, float(np.max(np.abs(w))))
        if np.any(w < -tol * scale * 1e4):
            raise NotPositiveSemidefinite(f"eigenvalues {w} of {self.labels}")
        return np.where(w < tol * scale, 0.0, w)


@dataclass(frozen=True)
class SingleModeMoments:
    """``<X^2>``, ``<Y^2>`` and the full anticommutator ``<{X, Y}>``."""

    xx: float
    yy: float
    xy_anti: float

    @property
    def xy_sym(self) -> float:
        """Symmetrized covariance, ``<{X, Y}>/2``."""
        return 0.5 * self.xy_anti

    @property
    def uncertainty_product(self) -> float:
        """``xx*yy - (xy_anti/2)**2``; equals 1/4 for a pure Gaussian state."""
        return self.xx * self.yy - self.xy_sym**2

    def correlator(self, labels: tuple[str, str] = ("X", "Y")) -> CorrelatorMatrix:
        return CorrelatorMatrix(
            labels, [[self.xx, self.xy_sym], [self.xy_sym, self.yy]]
        )


TWO_MODE_LABELS = ("X1", "Y1", "X2", "Y2")


@dataclass(frozen=True)
class TwoModeMoments:
    """Symmetrized 4x4 moment table over ``(X1, Y1, X2, Y2)``."""

    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=float)
        if table.shape != (4, 4):
            raise InvalidParameter(f"expected a 4x4 table, got {table.shape}")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def __getitem__(self, pair: tuple[str, str]) -> float:
        a, b = pair
        return float(self.table[TWO_MODE_LABELS.index(a), TWO_MODE_LABELS.index(b)])

    @property
    def dxx(self) -> float:
        """``<(X1 - X2)^2>``."""
        return self["X1", "X1"] + self["X2", "X2"] - 2.0 * self["X1", "X2"]

    @property
    def dyy(self) -> float:
        """``<(Y1 - Y2)^2>``."""
        return self["Y1", "Y1"] + self["Y2", "Y2"] - 2.0 * self["Y1", "Y2"]

    @property
    def dxy_anti(self) -> float:
        """Full anticommutator ``<{X1 - X2, Y1 - Y2}>``."""
        sym = self["X1", "Y1"] - self["X1", "Y2"] - self["X2", "Y1"] + self["X2", "Y2"]
        return 2.0 * sym

    def correlator(self, labels: Sequence[str] = TWO_MODE_LABELS) -> CorrelatorMatrix:
        return CorrelatorMatrix(tuple(labels), self.table)


def _validated(sq: SqueezeParams) -> SqueezeParams:
    if not isinstance(sq, SqueezeParams):
        raise InvalidParameter(f"expected SqueezeParams, got {type(sq).__name__}")
    return sq


def single_mode_moments(sq: SqueezeParams) -> SingleModeMoments:
    """Quadrature moments of a single-mode squeezed vacuum.

    >>> m = single_mode_moments(SqueezeParams(0.0, 1.3))
    >>> (m.xx, m.yy, m.xy_anti)
    (0.5, 0.5, 0.0)
    """
    sq = _validated(sq)
    anti, sqz = math.exp(2 * sq.r), math.exp(-2 * sq.r)
    c2, s2 = math.cos(sq.phi) ** 2, math.sin(sq.phi) ** 2
    return SingleModeMoments(
        xx=0.5 * (anti * c2 + sqz * s2),
        yy=0.5 * (sqz * c2 + anti * s2),
        xy_anti=0.5 * (sqz - anti) * math.sin(2 * sq.phi),
    )


def two_mode_moments(sq: SqueezeParams) -> TwoModeMoments:
    """Moment table of a two-mode squeezed vacuum.

    The difference quadratures ``X1 - X2`` and ``Y1 - Y2`` carry twice the
    single-mode moments at the same ``(r, phi)``.
    """
    sq = _validated(sq)
    ch, sh = math.cosh(2 * sq.r), math.sinh(2 * sq.r)
    c, s = math.cos(2 * sq.phi), math.sin(2 * sq.phi)
    diag = 0.5 * ch
    x1x2 = -0.5 * sh * c
    x1y2 = 0.5 * sh * s
    table = np.array(
        [
            # X1     Y1     X2     Y2
            [diag, 0.0, x1x2, x1y2],
            [0.0, diag, x1y2, -x1x2],
            [x1x2, x1y2, diag, 0.0],
            [x1y2, -x1x2, 0.0, diag],
        ]
    )
    return TwoModeMoments(table)
