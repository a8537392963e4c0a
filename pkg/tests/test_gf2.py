import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superclifford import gf2
from superclifford.checks import random_circuit
from superclifford.oracle import DenseSuperState, dense_evolve, stabilizer_residual
from superclifford.pauli import BasisOperatorLabel
from superclifford.tableau import Tableau, apply_sequence, canonical_generators, new_computational


def naive_rank(rows: list[int]) -> int:
    """Elimination on Python ints keyed by the highest set bit."""
    basis: dict[int, int] = {}
    for v in rows:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def test_identity_rank():
    assert gf2.rank(gf2.BitMatrix.from_dense(np.eye(3, dtype=np.uint8))) == 3


def test_all_ones_rank():
    assert gf2.rank(gf2.BitMatrix.from_dense(np.ones((2, 2), dtype=np.uint8))) == 1


@settings(max_examples=200)
@given(st.integers(1, 12), st.integers(1, 150), st.integers(0, 2**32 - 1))
def test_rank_matches_naive(rows, cols, seed):
    dense = np.random.default_rng(seed).integers(0, 2, (rows, cols), dtype=np.uint8)
    m = gf2.BitMatrix.from_dense(dense)
    ints = [m.row_as_int(i) for i in range(rows)]
    assert gf2.rank(m) == naive_rank(ints)


def test_pack_roundtrip(rng):
    dense = rng.integers(0, 2, (5, 130), dtype=np.uint8)
    m = gf2.BitMatrix.from_dense(dense)
    assert m.data.shape == (5, 3)
    np.testing.assert_array_equal(m.to_dense(), dense)
    # padding bits beyond column 130 stay clear
    assert int(m.data[:, 2].max()) < (1 << 2)
    np.testing.assert_array_equal(m.transpose().to_dense(), dense.T)


def test_rank_does_not_mutate(rng):
    m = gf2.BitMatrix.from_dense(rng.integers(0, 2, (6, 70), dtype=np.uint8))
    before = m.copy()
    gf2.rank(m)
    assert m == before


def test_echelon_identity_reports_nothing():
    ops = []
    _, k = gf2.row_echelon_with_callback(gf2.BitMatrix.from_dense(np.eye(4, dtype=np.uint8)),
                                         on_row_op=lambda *a: ops.append(a))
    assert k == 4 and ops == []


def test_echelon_equal_rows():
    ops = []
    m = gf2.BitMatrix.from_dense(np.array([[1, 0, 1], [1, 0, 1]], dtype=np.uint8))
    out, k = gf2.row_echelon_with_callback(m, on_row_op=lambda *a: ops.append(a))
    assert k == 1
    assert ops == [("add", 1, 0)]
    assert not out.to_dense()[1].any()


def test_replay_reproduces_echelon(rng):
    m = gf2.BitMatrix.from_dense(rng.integers(0, 2, (6, 12), dtype=np.uint8))
    ops = []
    out, _ = gf2.row_echelon_with_callback(m, range(6), lambda *a: ops.append(a))
    assert gf2.replay_row_ops(m, ops) == out


def test_pivot_range_validated():
    with pytest.raises(IndexError):
        gf2.row_echelon_with_callback(gf2.BitMatrix(2, 3), range(5))


def test_in_row_space():
    m = gf2.BitMatrix.from_dense(np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8))
    assert gf2.in_row_space(m, np.array([1, 0, 1]))
    assert not gf2.in_row_space(m, np.array([1, 0, 0]))


def test_mirrored_generators_still_stabilize(rng):
    # random 6-qubit tableau, row-reduce its 6x12 (x|z) matrix with mirrored products
    for _ in range(20):
        label = BasisOperatorLabel(tuple(int(b) for b in rng.integers(0, 2, 6)))
        gates = random_circuit(6, 40, rng)
        t = new_computational(label)
        apply_sequence(t, gates)
        reduced = Tableau.from_generators(canonical_generators(t))
        state = dense_evolve(label, gates)
        assert stabilizer_residual(reduced, state) < 1e-10
        assert stabilizer_residual(t, state) < 1e-10
