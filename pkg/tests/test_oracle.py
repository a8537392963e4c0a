import numpy as np
import pytest
from hypothesis import given, settings

from superclifford import oracle
from superclifford.oracle import (
    PAULI_X,
    PAULI_Y,
    DenseSuperState,
    SizeLimitError,
    conjugation_oracle,
    dense_apply,
    dense_entropy,
    dense_evolve,
    operator_to_superstate,
    physical_unitary,
    superstate_otoc,
    trace_otoc,
)
from superclifford.otoc import V_CATALOG
from superclifford.pauli import BasisOperatorLabel
from superclifford.tableau import GateOp

from conftest import circuits

S2 = np.sqrt(2)


def label(text):
    return BasisOperatorLabel.parse(text)


def test_t_on_zero():
    out = dense_apply(DenseSuperState.from_label(label("0")), GateOp.t(0))
    np.testing.assert_allclose(out.amplitudes, [1 / S2, -1 / S2])


def test_swap_01():
    out = dense_apply(DenseSuperState.from_label(label("01")), GateOp.swap(0, 1))
    np.testing.assert_allclose(out.amplitudes, DenseSuperState.from_label(label("10")).amplitudes)


def test_c3_on_100():
    out = dense_apply(DenseSuperState.from_label(label("100")), GateOp.c3(0, 1, 2))
    np.testing.assert_allclose(out.amplitudes, -DenseSuperState.from_label(label("111")).amplitudes)


def test_c3_fixes_000():
    out = dense_apply(DenseSuperState.from_label(label("000")), GateOp.c3(0, 1, 2))
    np.testing.assert_allclose(out.amplitudes, DenseSuperState.from_label(label("000")).amplitudes)


def test_super_gates_are_orthogonal():
    for kind in ("T", "TI", "SWAP", "C3"):
        from superclifford.tableau import GateKind

        m = oracle.super_gate_matrix(GateKind(kind))
        np.testing.assert_allclose(m @ m.conj().T, np.eye(len(m)), atol=1e-12)
        assert np.isrealobj(m) or np.allclose(m.imag, 0)


def test_entropy_examples():
    assert dense_entropy(DenseSuperState.from_label(label("0110")), [0, 1]) == pytest.approx(0, abs=1e-12)
    bell = DenseSuperState(2, np.array([1, 0, 0, 1], dtype=complex) / S2)
    assert dense_entropy(bell, [0]) == pytest.approx(1.0)
    st = dense_evolve(label("000"), [GateOp.t(0), GateOp.c3(0, 1, 2)])
    assert dense_entropy(st, [0]) == pytest.approx(1.0)


def test_conjugate_x_by_t():
    w = conjugation_oracle(label("0"), [GateOp.t(0)])
    np.testing.assert_allclose(w, (PAULI_X - PAULI_Y) / S2, atol=1e-12)


def test_c3_conjugation_of_xxx():
    w = conjugation_oracle(label("000"), [GateOp.c3(0, 1, 2)])
    state, leak = operator_to_superstate(w, 3)
    assert leak < 1e-12
    np.testing.assert_allclose(state.amplitudes, dense_evolve(label("000"), [GateOp.c3(0, 1, 2)]).amplitudes,
                               atol=1e-12)


def test_c3_equals_product_of_controlled_y():
    # on S, C3 acts as CY(1->2) CY(1->3) in super-space; check on all basis states
    for bits in range(8):
        lab = BasisOperatorLabel(tuple(int(c) for c in f"{bits:03b}"))
        out = dense_apply(DenseSuperState.from_label(lab), GateOp.c3(0, 1, 2)).amplitudes
        expect = DenseSuperState.from_label(lab).amplitudes
        if lab.bits[0]:
            flipped = BasisOperatorLabel((1, 1 - lab.bits[1], 1 - lab.bits[2]))
            phase = (1j if lab.bits[1] == 0 else -1j) * (1j if lab.bits[2] == 0 else -1j)
            expect = phase * DenseSuperState.from_label(flipped).amplitudes
        np.testing.assert_allclose(out, expect, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(circuits(max_n=5, max_len=50))
def test_conjugation_stays_in_subspace(case):
    w0, gates = case
    w = conjugation_oracle(w0, gates)
    state, leak = operator_to_superstate(w, w0.n)
    assert leak < 1e-10
    np.testing.assert_allclose(state.amplitudes, dense_evolve(w0, gates).amplitudes, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(circuits(min_n=3, max_n=5, max_len=20))
def test_trace_and_superstate_otoc_agree(case):
    w0, gates = case
    for v in V_CATALOG.values():
        assert abs(trace_otoc(w0, gates, v) - superstate_otoc(w0, gates, v)) < 1e-10


def test_physical_unitary_is_unitary():
    u = physical_unitary([GateOp.t(2), GateOp.c3(0, 1, 2), GateOp.swap(0, 2)], 3)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(8), atol=1e-12)


def test_size_limits():
    with pytest.raises(SizeLimitError):
        DenseSuperState.from_label(BasisOperatorLabel.zeros(oracle.MAX_SUPER_N + 1))
    with pytest.raises(SizeLimitError):
        conjugation_oracle(BasisOperatorLabel.zeros(oracle.MAX_PHYSICAL_N + 1), [])
