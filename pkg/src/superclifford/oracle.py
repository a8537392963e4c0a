"""Brute-force references used for differential testing.

Two tiers:

* super-state tier: the operator W in S is a vector of 2**N amplitudes over
  X/Y strings (X <-> |0>, Y <-> |1>) and gates act as 2**k x 2**k super-gates;
* physical tier: W is a literal 2**N x 2**N matrix conjugated by the physical
  unitaries T, SWAP and C3 = CX_21 CX_31 CZ_12 T_1^6 T_2^6.

Qubit 0 is the most significant bit of every dense index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .pauli import BasisOperatorLabel, SuperPauli
from .tableau import GateKind, GateOp, Tableau

MAX_SUPER_N = 12
MAX_PHYSICAL_N = 6

_SQ2 = np.sqrt(2.0)
# |0> -> (|0> - |1>)/sqrt2, |1> -> (|0> + |1>)/sqrt2, i.e. Z.H
SUPER_T = np.array([[1.0, 1.0], [-1.0, 1.0]]) / _SQ2
SUPER_T_INV = SUPER_T.T
SUPER_Y = np.array([[0, -1j], [1j, 0]])

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]])
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)
PHYS_T = np.diag([1.0, np.exp(1j * np.pi / 4)])


class SizeLimitError(ValueError):
    """Dense evaluation requested beyond the supported number of qubits."""


def _check_size(n: int, limit: int) -> None:
    if n > limit:
        raise SizeLimitError(f"dense oracle limited to n <= {limit}, got {n}")


@dataclass
class DenseSuperState:
    n: int
    amplitudes: np.ndarray

    @classmethod
    def from_label(cls, label: BasisOperatorLabel) -> "DenseSuperState":
        _check_size(label.n, MAX_SUPER_N)
        amps = np.zeros(2**label.n, dtype=complex)
        amps[int("".join(map(str, label.bits)), 2)] = 1.0
        return cls(label.n, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "DenseSuperState":
        return DenseSuperState(self.n, self.amplitudes.copy())


def _apply_local(amps: np.ndarray, n: int, mat: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    k = len(qubits)
    psi = amps.reshape([2] * n)
    psi = np.moveaxis(psi, qubits, range(k))
    shape = psi.shape
    psi = (mat @ psi.reshape(2**k, -1)).reshape(shape)
    return np.moveaxis(psi, range(k), qubits).reshape(-1)


def _super_c3() -> np.ndarray:
    # CY(c->a) CY(c->b): on control |1> apply Y to both targets
    out = np.zeros((8, 8), dtype=complex)
    out[:4, :4] = np.eye(4)
    out[4:, 4:] = np.kron(SUPER_Y, SUPER_Y)
    return out


_SUPER_C3 = _super_c3()
_SUPER_SWAP = np.eye(4)[[0, 2, 1, 3]]


def super_gate_matrix(kind: GateKind) -> np.ndarray:
    return {
        GateKind.T: SUPER_T,
        GateKind.T_INV: SUPER_T_INV,
        GateKind.SWAP: _SUPER_SWAP,
        GateKind.C3: _SUPER_C3,
    }[kind]


def dense_apply(state: DenseSuperState, g: GateOp) -> DenseSuperState:
    _check_size(state.n, MAX_SUPER_N)
    if max(g.qubits) >= state.n:
        raise IndexError(f"{g} out of range for n={state.n}")
    amps = _apply_local(state.amplitudes, state.n, super_gate_matrix(g.kind), list(g.qubits))
    return DenseSuperState(state.n, amps)


def dense_evolve(label: BasisOperatorLabel, gates: Sequence[GateOp]) -> DenseSuperState:
    state = DenseSuperState.from_label(label)
    for g in gates:
        state = dense_apply(state, g)
    return state


def schmidt_values(state: DenseSuperState, region: Sequence[int]) -> np.ndarray:
    a = sorted(set(region))
    rest = [q for q in range(state.n) if q not in a]
    psi = np.moveaxis(state.amplitudes.reshape([2] * state.n), a + rest, range(state.n))
    return np.linalg.svd(psi.reshape(2 ** len(a), -1), compute_uv=False)


def dense_entropy(state: DenseSuperState, region: Sequence[int]) -> float:
    """Von Neumann entropy (base 2) of the operator state across ``region``."""
    _check_size(state.n, MAX_SUPER_N)
    sv = schmidt_values(state, region)
    p = sv**2 / np.sum(sv**2)
    p = p[p > 1e-14]
    return float(-np.sum(p * np.log2(p)) + 0.0)


def super_pauli_apply(p: SuperPauli, amps: np.ndarray) -> np.ndarray:
    """Apply (-1)**s X^x Z^z (Z first, then X) to a dense super-state vector."""
    n = p.n
    idx = np.arange(2**n)
    xmask = sum(1 << (n - 1 - i) for i in range(n) if (p.x >> i) & 1)
    zmask = sum(1 << (n - 1 - i) for i in range(n) if (p.z >> i) & 1)
    parity = np.bitwise_count((idx & zmask).astype(np.uint64)) & 1
    phased = amps * np.where(parity, -1.0, 1.0)
    out = np.empty_like(amps)
    out[idx ^ xmask] = phased
    return -out if p.sign else out


def super_pauli_matrix(p: SuperPauli) -> np.ndarray:
    factors = []
    for i in range(p.n):
        m = np.eye(2)
        if (p.x >> i) & 1:
            m = m @ PAULI_X.real
        if (p.z >> i) & 1:
            m = m @ PAULI_Z.real
        factors.append(m)
    mat = reduce(np.kron, factors)
    return -mat if p.sign else mat


def stabilizer_residual(t: Tableau, state: DenseSuperState) -> float:
    """max over generators of |O_a psi - psi|."""
    return max(
        float(np.max(np.abs(super_pauli_apply(g, state.amplitudes) - state.amplitudes)))
        for g in t.generators()
    )


# -- physical tier ---------------------------------------------------------


def _embed(mats: dict[int, np.ndarray], n: int) -> np.ndarray:
    return reduce(np.kron, [mats.get(q, PAULI_I) for q in range(n)])


def _controlled(u: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return _embed({control: p0}, n) + _embed({control: p1, target: u}, n)


def physical_gate_matrix(g: GateOp, n: int) -> np.ndarray:
    """Literal unitary of a gate on n qubits (C3 expanded into CX, CZ and T^6)."""
    q = g.qubits
    if g.kind is GateKind.T:
        return _embed({q[0]: PHYS_T}, n)
    if g.kind is GateKind.T_INV:
        return _embed({q[0]: PHYS_T.conj().T}, n)
    if g.kind is GateKind.SWAP:
        a, b = q
        dim = 2**n
        out = np.zeros((dim, dim), dtype=complex)
        for idx in range(dim):
            ba = (idx >> (n - 1 - a)) & 1
            bb = (idx >> (n - 1 - b)) & 1
            j = idx
            if ba != bb:
                j ^= (1 << (n - 1 - a)) | (1 << (n - 1 - b))
            out[j, idx] = 1.0
        return out
    c, a, b = q
    t6 = np.linalg.matrix_power(PHYS_T, 6)
    # CX_21: control is the first target qubit, target is the C3 control
    return (
        _controlled(PAULI_X, a, c, n)
        @ _controlled(PAULI_X, b, c, n)
        @ _controlled(PAULI_Z, c, a, n)
        @ _embed({c: t6}, n)
        @ _embed({a: t6}, n)
    )


def physical_unitary(gates: Sequence[GateOp], n: int) -> np.ndarray:
    """Unitary V whose conjugation V^dagger W V applies ``gates`` in list order."""
    out = np.eye(2**n, dtype=complex)
    for g in gates:
        out = out @ physical_gate_matrix(g, n)
    return out


def basis_operator(label: BasisOperatorLabel) -> np.ndarray:
    return reduce(np.kron, [PAULI_Y if b else PAULI_X for b in label.bits])


def conjugation_oracle(w0: BasisOperatorLabel, gates: Sequence[GateOp]) -> np.ndarray:
    """W(t) as a dense matrix, conjugating W(0) gate by gate: W -> G^dagger W G."""
    n = w0.n
    _check_size(n, MAX_PHYSICAL_N)
    w = basis_operator(w0)
    for g in gates:
        u = physical_gate_matrix(g, n)
        w = u.conj().T @ w @ u
    return w


def operator_to_superstate(w: np.ndarray, n: int) -> tuple[DenseSuperState, float]:
    """Project W onto the X/Y strings; also return the norm left outside S."""
    amps = np.empty(2**n, dtype=complex)
    recon = np.zeros_like(w)
    for j, bits in enumerate(itertools.product((0, 1), repeat=n)):
        p = basis_operator(BasisOperatorLabel(bits))
        amps[j] = np.sum(p.conj() * w) / 2**n
        recon += amps[j] * p
    leak = float(np.linalg.norm(w - recon) / np.sqrt(2**n))
    return DenseSuperState(n, amps), leak


def trace_otoc(w0: BasisOperatorLabel, gates: Sequence[GateOp], v_gates: Sequence[GateOp]) -> complex:
    """(1/2^N) Tr(W(t)^dagger V^dagger W(t) V) from literal matrices."""
    n = w0.n
    w = conjugation_oracle(w0, gates)
    v = physical_unitary(v_gates, n)
    return complex(np.trace(w.conj().T @ v.conj().T @ w @ v) / 2**n)


def superstate_otoc(w0: BasisOperatorLabel, gates: Sequence[GateOp], v_gates: Sequence[GateOp]) -> complex:
    """Same quantity as :func:`trace_otoc` evaluated as <W(t)| V W(t)> in super-space."""
    psi = dense_evolve(w0, gates)
    phi = psi
    for g in v_gates:
        phi = dense_apply(phi, g)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


__all__ = [
    "DenseSuperState",
    "MAX_PHYSICAL_N",
    "MAX_SUPER_N",
    "SizeLimitError",
    "basis_operator",
    "conjugation_oracle",
    "dense_apply",
    "dense_entropy",
    "dense_evolve",
    "operator_to_superstate",
    "physical_gate_matrix",
    "physical_unitary",
    "schmidt_values",
    "stabilizer_residual",
    "super_gate_matrix",
    "super_pauli_apply",
    "super_pauli_matrix",
    "superstate_otoc",
    "trace_otoc",
]
