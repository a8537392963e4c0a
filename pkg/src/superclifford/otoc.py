"""OTOCs of X/Y-string operators via echo tableaux and stabilizer inner products.

``F(t) = 2^-N Tr(W(t)^dagger V^dagger W(t) V)`` is evaluated as the overlap of
``|0...0>`` with the echo state

    R^-1 . U^-1 . V . U . R |0...0>

where R rotates the all-X string into the chosen basis operator (two T gates on
every Y site) and U is the circuit. The overlap of two stabilizer states is
either 0 or ``2^(-k/2)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from . import gf2
from .oracle import basis_operator, physical_unitary
from .pauli import BasisOperatorLabel
from .tableau import (
    GateOp,
    Tableau,
    apply_layer,
    apply_layers,
    apply_sequence,
    new_computational,
)


@dataclass(frozen=True)
class OtocValue:
    is_zero: bool
    k: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"k must be nonnegative, got {self.k}")

    @classmethod
    def zero(cls) -> "OtocValue":
        return cls(True, 0)

    @property
    def value(self) -> float:
        return 0.0 if self.is_zero else 2.0 ** (-self.k / 2)

    def label(self) -> str:
        """Exact text form: ``"0"`` or ``"2^-k/2"``."""
        return "0" if self.is_zero else f"2^-{self.k}/2"

    def __float__(self) -> float:
        return self.value


V_CATALOG: dict[str, list[GateOp]] = {
    "identity": [],
    "C3": [GateOp.c3(0, 1, 2)],
    # physical V = T_3 C3: conjugate by T on the third qubit, then by C3
    "T3C3": [GateOp.t(2), GateOp.c3(0, 1, 2)],
}


def resolve_v_gates(spec: str | Sequence[GateOp]) -> list[GateOp]:
    """Look up a catalog name or parse a gate list like ``"T(2) C3(0;1,2)"``."""
    if not isinstance(spec, str):
        return list(spec)
    if spec in V_CATALOG:
        return list(V_CATALOG[spec])
    from .tableau import parse_gates

    gates = parse_gates(spec)
    if not gates and spec.strip():
        raise ValueError(f"unknown V {spec!r}; catalog: {sorted(V_CATALOG)}")
    return gates


def basis_rotation(w0: BasisOperatorLabel) -> list[GateOp]:
    """Gates taking |0...0> to +-|w0>: T twice on every Y site."""
    return [GateOp.t(i) for i, b in enumerate(w0.bits) if b for _ in range(2)]


def echo_tableau(circuit: Sequence[GateOp], v_gates: Sequence[GateOp], w0: BasisOperatorLabel) -> Tableau:
    rot = basis_rotation(w0)
    t = new_computational(BasisOperatorLabel.zeros(w0.n))
    apply_sequence(t, rot)
    apply_sequence(t, circuit)
    apply_sequence(t, v_gates)
    apply_sequence(t, circuit, reversed_inverse=True)
    apply_sequence(t, rot, reversed_inverse=True)
    return t


def inner_product_reference(t: Tableau, target: BasisOperatorLabel) -> OtocValue:
    """|<target|t>| by row reduction mirrored on SuperPauli generators.

    Straightforward but slow for large N; :func:`inner_product_with_basis`
    gives the same answer from a compiled kernel.
    """
    if target.n != t.n:
        raise ValueError("target and tableau sizes differ")
    n = t.n
    gens = t.generators()
    m = gf2.BitMatrix.from_dense(np.hstack([t.x_matrix(), t.z_matrix()]))

    def mirror(kind, i, j):
        if kind == "swap":
            gens[i], gens[j] = gens[j], gens[i]
        else:
            gens[i] = gens[i] * gens[j]

    _, k = gf2.row_echelon_with_callback(m, range(n), mirror)
    if k == n:
        return OtocValue(False, n)
    tbits = target.as_int()
    for g in gens[k:]:
        if g.x:
            raise AssertionError("row reduction left X support below the pivots")
        if g.sign != ((g.z & tbits).bit_count() & 1):
            return OtocValue.zero()
    return OtocValue(False, k)


@numba.njit(cache=True)
def _parity(v):
    v ^= v >> np.uint64(32)
    v ^= v >> np.uint64(16)
    v ^= v >> np.uint64(8)
    v ^= v >> np.uint64(4)
    v ^= v >> np.uint64(2)
    v ^= v >> np.uint64(1)
    return v & np.uint64(1)


@numba.njit(cache=True)
def _overlap_kernel(xs, zs, signs, target, n):
    # rows are generators; row_i <- row_i * row_j flips the sign by parity(z_i & x_j)
    rows, nw = xs.shape
    r = 0
    for c in range(n):
        if r == rows:
            break
        w = c >> 6
        b = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for i in range(r, rows):
            if xs[i, w] & b:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for q in range(nw):
                tmp = xs[r, q]
                xs[r, q] = xs[p, q]
                xs[p, q] = tmp
                tmp = zs[r, q]
                zs[r, q] = zs[p, q]
                zs[p, q] = tmp
            s = signs[r]
            signs[r] = signs[p]
            signs[p] = s
        for i in range(r + 1, rows):
            if xs[i, w] & b:
                acc = np.uint64(0)
                for q in range(nw):
                    acc ^= zs[i, q] & xs[r, q]
                    xs[i, q] ^= xs[r, q]
                    zs[i, q] ^= zs[r, q]
                signs[i] ^= np.uint8(_parity(acc)) ^ signs[r]
        r += 1
    for i in range(r, rows):
        acc = np.uint64(0)
        for q in range(nw):
            acc ^= zs[i, q] & target[q]
        if np.uint8(_parity(acc)) != signs[i]:
            return r, False
    return r, True


def inner_product_with_basis(t: Tableau, target: BasisOperatorLabel) -> OtocValue:
    """|<target|t>| as an exact OtocValue."""
    if target.n != t.n:
        raise ValueError("target and tableau sizes differ")
    n = t.n
    xs = gf2.pack_rows(t.x_matrix())
    zs = gf2.pack_rows(t.z_matrix())
    signs = t.sign_bits().astype(np.uint8)
    tgt = gf2.pack_rows(np.array([target.bits], dtype=np.uint8))[0]
    k, consistent = _overlap_kernel(xs, zs, signs, tgt, n)
    if k == n:
        return OtocValue(False, n)
    return OtocValue(False, int(k)) if consistent else OtocValue.zero()


def otoc_trace(
    steps: Sequence[Sequence[GateOp]],
    v_gates: Sequence[GateOp],
    w0: BasisOperatorLabel,
    times: Sequence[int],
) -> list[OtocValue]:
    """F(t) for each t in ``times`` using the first t layers of ``steps``.

    Each layer must consist of gates on distinct qubits. The forward tableau is
    advanced incrementally; the echo is rebuilt for every requested time.
    """
    times = list(times)
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be strictly increasing")
    if times and (times[0] < 0 or times[-1] > len(steps)):
        raise ValueError(f"times must lie in 0..{len(steps)}")
    n = w0.n
    rot = basis_rotation(w0)
    zeros = BasisOperatorLabel.zeros(n)
    fwd = new_computational(zeros)
    apply_sequence(fwd, rot)
    out = []
    done = 0
    for t in times:
        while done < t:
            apply_layer(fwd, steps[done])
            done += 1
        echo = fwd.copy()
        apply_sequence(echo, v_gates)
        apply_layers(echo, steps[:t], reversed_inverse=True)
        apply_sequence(echo, rot, reversed_inverse=True)
        out.append(inner_product_with_basis(echo, zeros))
    return out


def plateau_value(v_gates: Sequence[GateOp], region_size: int) -> float:
    """Late-time OTOC: average of Tr(P V^dagger P V) over normalized X/Y strings P on the region."""
    if not 1 <= region_size <= 5:
        raise ValueError(f"region_size must be in 1..5, got {region_size}")
    for g in v_gates:
        if max(g.qubits) >= region_size:
            raise ValueError(f"{g} acts outside the first {region_size} qubits")
    d = 2**region_size
    v = physical_unitary(v_gates, region_size)
    total = 0.0 + 0.0j
    for bits in itertools.product((0, 1), repeat=region_size):
        p = basis_operator(BasisOperatorLabel(bits)) / np.sqrt(d)
        total += np.trace(p @ v.conj().T @ p @ v)
    val = total / d
    if abs(val.imag) > 1e-12:
        raise ArithmeticError(f"plateau value has imaginary part {val.imag}")
    return float(val.real)


def support_size(v_gates: Sequence[GateOp]) -> int:
    return max((max(g.qubits) for g in v_gates), default=0) + 1


__all__ = [
    "OtocValue",
    "V_CATALOG",
    "basis_rotation",
    "echo_tableau",
    "inner_product_reference",
    "inner_product_with_basis",
    "otoc_trace",
    "plateau_value",
    "resolve_v_gates",
    "support_size",
]
