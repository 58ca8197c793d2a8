"""Heisenberg-picture evolution of linear operator combinations.

Observables are real linear combinations of canonical operators drawn from
a small labeled basis. Every evolution used here is generated by a
Hamiltonian quadratic in those operators, so it acts on the basis as a real
matrix ``M`` with ``U^dag q_j U = sum_k M[j, k] q_k``. For a product
``U = U1 U2`` the matrices compose in the same order, ``M = M1 @ M2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.linalg import expm

from .exceptions import InvalidParameter


@dataclass(frozen=True)
class OperatorBasis:
    """Ordered operator labels grouped into canonical pairs.

    ``pairs`` lists ``(q, p)`` label pairs with ``[q, p] = i``. Pairs listed
    in ``mechanical`` belong to the mechanical system, the rest are optical.
    """

    pairs: tuple[tuple[str, str], ...]
    mechanical: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        pairs = tuple(tuple(p) for p in self.pairs)
        mech = tuple(tuple(p) for p in self.mechanical)
        labels = [l for p in pairs for l in p]
        if len(set(labels)) != len(labels):
            raise InvalidParameter(f"operator labels must be unique: {labels}")
        if any(p not in pairs for p in mech):
            raise InvalidParameter("mechanical pairs must be part of the basis")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "mechanical", mech)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for p in self.pairs for l in p)

    @property
    def optical_labels(self) -> tuple[str, ...]:
        return tuple(l for p in self.pairs if p not in self.mechanical for l in p)

    @property
    def mechanical_labels(self) -> tuple[str, ...]:
        return tuple(l for p in self.mechanical for l in p)

    def __len__(self):
        return 2 * len(self.pairs)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidParameter(f"unknown operator label {label!r}") from None

    def symplectic_form(self) -> np.ndarray:
        """``Omega`` with ``[q_j, q_k] = i Omega[j, k]``."""
        n = len(self)
        omega = np.zeros((n, n))
        for k in range(len(self.pairs)):
            omega[2 * k, 2 * k + 1] = 1.0
            omega[2 * k + 1, 2 * k] = -1.0
        return omega

    def vector(self, coefficients: Mapping[str, float] | None = None, **kwargs: float) -> "OperatorVector":
        coeffs = dict(coefficients or {}, **kwargs)
        out = np.zeros(len(self))
        for label, c in coeffs.items():
            out[self.index(label)] = c
        return OperatorVector(self, out)

    def unit(self, label: str) -> "OperatorVector":
        return self.vector({label: 1.0})


@dataclass(frozen=True, eq=False)
class OperatorVector:
    """A real linear combination ``sum_j c_j q_j`` of basis operators."""

    basis: OperatorBasis
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        if c.shape != (len(self.basis),):
            raise InvalidParameter(f"expected {len(self.basis)} coefficients, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidParameter("operator coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __getitem__(self, label: str) -> float:
        return float(self.coefficients[self.basis.index(label)])

    def _check(self, other: "OperatorVector"):
        if other.basis != self.basis:
            raise InvalidParameter("operator vectors live on different bases")

    def __add__(self, other: "OperatorVector") -> "OperatorVector":
        self._check(other)
        return OperatorVector(self.basis, self.coefficients + other.coefficients)

    def __sub__(self, other: "OperatorVector") -> "OperatorVector":
        self._check(other)
        return OperatorVector(self.basis, self.coefficients - other.coefficients)

    def __neg__(self):
        return OperatorVector(self.basis, -self.coefficients)

    def __mul__(self, scale: float) -> "OperatorVector":
        return OperatorVector(self.basis, self.coefficients * float(scale))

    __rmul__ = __mul__

    def __truediv__(self, scale: float) -> "OperatorVector":
        return OperatorVector(self.basis, self.coefficients / float(scale))

    def as_dict(self, drop_zeros: bool = False) -> dict[str, float]:
        items = zip(self.basis.labels, self.coefficients.tolist())
        return {l: c for l, c in items if not (drop_zeros and c == 0.0)}

    def restrict(self, labels: Iterable[str]) -> dict[str, float]:
        """Coefficients of the given labels only."""
        return {l: self[l] for l in labels}

    def optical_part(self) -> dict[str, float]:
        return self.restrict(self.basis.optical_labels)

    def __repr__(self):
        terms = " ".join(f"{c:+.6g}*{l}" for l, c in self.as_dict(drop_zeros=True).items())
        return f"OperatorVector({terms or '0'})"


@dataclass(frozen=True, eq=False)
class AffineMap:
    """Linear Heisenberg map ``q -> M q`` on an operator basis."""

    basis: OperatorBasis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (len(self.basis), len(self.basis)):
            raise InvalidParameter(f"map shape {m.shape} does not match basis of size {len(self.basis)}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, basis: OperatorBasis) -> "AffineMap":
        return cls(basis, np.eye(len(basis)))

    @classmethod
    def from_hamiltonian(cls, basis: OperatorBasis, hessian: np.ndarray) -> "AffineMap":
        """Map generated by ``U = exp(-i H)`` with ``H = q^T K q / 2``.

        ``hessian`` is the real symmetric ``K``; the time step is absorbed
        into it. The Heisenberg equation gives ``U^dag q U = expm(Omega K) q``.
        """
        k = np.asarray(hessian, dtype=float)
        if not np.allclose(k, k.T):
            raise InvalidParameter("Hamiltonian matrix must be symmetric")
        return cls(basis, expm(basis.symplectic_form() @ k))

    @classmethod
    def bilinear(cls, basis: OperatorBasis, left: Mapping[str, float], right: Mapping[str, float]) -> "AffineMap":
        """Map for ``H = A B`` where ``A`` and ``B`` are commuting linear forms."""
        a = basis.vector(left).coefficients
        b = basis.vector(right).coefficients
        return cls.from_hamiltonian(basis, np.outer(a, b) + np.outer(b, a))

    @classmethod
    def quadratic(cls, basis: OperatorBasis, label: str, weight: float) -> "AffineMap":
        """Map for ``H = weight * q**2 / 2`` on a single operator."""
        k = np.zeros((len(basis), len(basis)))
        i = basis.index(label)
        k[i, i] = weight
        return cls.from_hamiltonian(basis, k)

    def __matmul__(self, other: "AffineMap") -> "AffineMap":
        """Map of the product ``U_self U_other``."""
        if other.basis != self.basis:
            raise InvalidParameter("maps live on different bases")
        return AffineMap(self.basis, self.matrix @ other.matrix)

    def apply(self, vector: OperatorVector) -> OperatorVector:
        """Heisenberg image of an operator combination."""
        if vector.basis != self.basis:
            raise InvalidParameter("vector and map live on different bases")
        return OperatorVector(self.basis, vector.coefficients @ self.matrix)

    def image(self, label: str) -> OperatorVector:
        return OperatorVector(self.basis, self.matrix[self.basis.index(label)])

    def images(self) -> dict[str, OperatorVector]:
        return {l: self.image(l) for l in self.basis.labels}

    def is_symplectic(self, tol: float = 1e-10) -> bool:
        omega = self.basis.symplectic_form()
        return bool(np.allclose(self.matrix @ omega @ self.matrix.T, omega, atol=tol))


def compose(maps: Sequence[AffineMap]) -> AffineMap:
    """Map of ``U_0 U_1 ... U_n`` given the maps of the factors in that order."""
    if not maps:
        raise InvalidParameter("nothing to compose")
    out = maps[0]
    for m in maps[1:]:
        out = out @ m
    return out


def beamsplitter_loss(basis: OperatorBasis, mode: tuple[str, str], ancilla: tuple[str, str], eta: float) -> AffineMap:
    """Mix ``mode`` with a vacuum ``ancilla`` at loss angle ``eta``.

    Both quadratures of the mode map to ``cos(eta) q + sin(eta) q_anc``;
    the power loss fraction is ``sin(eta)**2``.
    """
    c, s = np.cos(eta), np.sin(eta)
    m = np.eye(len(basis))
    for q, qa in zip(mode, ancilla):
        i, j = basis.index(q), basis.index(qa)
        m[i, i], m[i, j] = c, s
        m[j, i], m[j, j] = -s, c
    return AffineMap(basis, m)
