import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from optonoise import AffineMap, InvalidParameter, OperatorBasis, beamsplitter_loss, compose
from optonoise.toy import SINGLE_BASIS, TWO_BASIS, ToySingleParams, ToyTwoParams, single_mode_map, two_mode_map

BASIS = OperatorBasis(pairs=(("X", "Y"), ("x0", "p0")), mechanical=(("x0", "p0"),))


def test_basis_partitions_labels():
    assert BASIS.labels == ("X", "Y", "x0", "p0")
    assert BASIS.optical_labels == ("X", "Y")
    assert BASIS.mechanical_labels == ("x0", "p0")


def test_duplicate_labels_rejected():
    with pytest.raises(InvalidParameter):
        OperatorBasis(pairs=(("X", "Y"), ("X", "p0")))


def test_unknown_label():
    with pytest.raises(InvalidParameter):
        BASIS.unit("Z")


def test_vector_arithmetic_and_repr():
    v = BASIS.vector(X=1.0, x0=-2.0) + BASIS.unit("Y") * 3.0
    assert v.as_dict(drop_zeros=True) == {"X": 1.0, "Y": 3.0, "x0": -2.0}
    assert repr(-v / 2) == "OperatorVector(-0.5*X -1.5*Y +1*x0)"


def test_free_drift_map():
    # H = beta p^2 / 2 shifts position by beta p
    m = AffineMap.quadratic(BASIS, "p0", 0.5)
    assert m.image("x0").as_dict(drop_zeros=True) == {"x0": 1.0, "p0": 0.5}
    assert m.image("p0").as_dict(drop_zeros=True) == {"p0": 1.0}


def test_kick_map():
    # H = zeta x0 X: Y -> Y - zeta x0, p0 -> p0 - zeta X
    m = AffineMap.bilinear(BASIS, {"x0": 1.0}, {"X": 2.0})
    assert m.image("Y").as_dict(drop_zeros=True) == {"Y": 1.0, "x0": -2.0}
    assert m.image("p0").as_dict(drop_zeros=True) == {"X": -2.0, "p0": 1.0}


def test_composition_order_matches_product():
    k = AffineMap.bilinear(BASIS, {"x0": 1.0}, {"X": 1.0})
    d = AffineMap.quadratic(BASIS, "p0", 1.0)
    # Y through U = K D: the kick acts on the drifted operators
    y = compose([k, d]).image("Y")
    assert y.as_dict(drop_zeros=True) == {"Y": 1.0, "x0": -1.0, "p0": -1.0}


@given(st.floats(0.0, 5.0), st.floats(0.01, 5.0), st.floats(0.0, math.pi / 2))
def test_toy_maps_are_symplectic(zeta, beta, eta):
    assert single_mode_map(ToySingleParams(zeta, beta, 0.0, eta)).is_symplectic()
    assert two_mode_map(ToyTwoParams(zeta, 0.8 * zeta, beta, 0.0, eta)).is_symplectic(tol=1e-8)


def test_beamsplitter_mixes_with_ancilla():
    m = beamsplitter_loss(SINGLE_BASIS, ("X", "Y"), ("Xin", "Yin"), math.asin(math.sqrt(0.1)))
    y = m.image("Y")
    assert y["Y"] == pytest.approx(math.sqrt(0.9))
    assert y["Yin"] == pytest.approx(math.sqrt(0.1))
    assert m.is_symplectic()


def test_bases_disjoint():
    a = AffineMap.identity(SINGLE_BASIS)
    b = AffineMap.identity(TWO_BASIS)
    with pytest.raises(InvalidParameter):
        a @ b


def test_non_symmetric_hamiltonian_rejected():
    with pytest.raises(InvalidParameter):
        AffineMap.from_hamiltonian(BASIS, np.triu(np.ones((4, 4))))
