import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superclifford.oracle import super_pauli_matrix
from superclifford.pauli import (
    BasisOperatorLabel,
    DimensionError,
    SuperPauli,
    multiply,
    square_sign,
    symplectic_commutes,
)

from conftest import super_paulis


def test_z_squared_is_identity():
    z = SuperPauli(1, 0, 0, 1)
    assert multiply(z, z) == SuperPauli.identity(1)


def test_zx_reorders_with_sign():
    z = SuperPauli(1, 0, 0, 1)
    x = SuperPauli(1, 0, 1, 0)
    assert multiply(z, x) == SuperPauli(1, 1, 1, 1)


def test_minus_xz_times_z():
    a = SuperPauli.parse("-XZ")
    b = SuperPauli.parse(".Z")
    assert multiply(a, b) == SuperPauli(1, 1, 1, 0)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(super_paulis(n), super_paulis(n))))
def test_product_matches_dense_matrices(pair):
    a, b = pair
    lhs = super_pauli_matrix(a) @ super_pauli_matrix(b)
    np.testing.assert_allclose(lhs, super_pauli_matrix(multiply(a, b)), atol=1e-12)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(super_paulis(n), super_paulis(n))))
def test_commutation_matches_dense(pair):
    a, b = pair
    ma, mb = super_pauli_matrix(a), super_pauli_matrix(b)
    assert symplectic_commutes(a, b) == np.allclose(ma @ mb, mb @ ma)


@given(super_paulis())
def test_square_sign(a):
    sq = multiply(a, a)
    assert sq.x == 0 and sq.z == 0 and sq.sign == square_sign(a)


def test_commutation_examples():
    x1, z1 = SuperPauli.parse("X."), SuperPauli.parse(".Z")
    assert symplectic_commutes(x1, x1)
    assert not symplectic_commutes(x1, z1)
    assert symplectic_commutes(SuperPauli.parse("X..Z"), SuperPauli.parse(".ZX."))


@given(super_paulis())
def test_str_parse_roundtrip(p):
    assert SuperPauli.parse(str(p)) == p


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(SuperPauli.identity(1), SuperPauli.identity(2))
    with pytest.raises(DimensionError):
        SuperPauli.from_bits(0, [1, 0], [1])


def test_invalid_bits():
    with pytest.raises(ValueError):
        SuperPauli(1, 2, 0, 0)
    with pytest.raises(ValueError):
        SuperPauli(1, 0, 2, 0)


def test_basis_label_parse():
    assert BasisOperatorLabel.parse("YXX").bits == (1, 0, 0)
    assert BasisOperatorLabel.parse("1", 4).bits == (1, 0, 0, 0)
    assert BasisOperatorLabel.zeros(3).as_int() == 0
    assert BasisOperatorLabel.parse("011").as_int() == 0b110
    with pytest.raises(ValueError):
        BasisOperatorLabel.parse("XZ")
    with pytest.raises(DimensionError):
        BasisOperatorLabel.parse("0101", 3)
