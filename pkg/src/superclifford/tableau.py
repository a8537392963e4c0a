"""Super-stabilizer tableau and the T / T_INV / SWAP / C3 update rules.

Storage is column-sliced: ``x[q]`` and ``z[q]`` are packed bitsets over the N
generators holding the X and Z components of qubit ``q``; ``sign`` is a packed
bitset over generators. A gate on k qubits therefore touches 2k rows of
``ceil(N / 64)`` words, independent of how many other qubits there are.

Gate lists are applied in list order as super-operators acting on the operator
state, i.e. each gate ``G`` maps the operator ``W`` to ``G^dagger W G``.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .pauli import BasisOperatorLabel, DimensionError, SuperPauli, bits_to_int

_XOR = np.bitwise_xor


class GateKind(enum.Enum):
    T = "T"
    T_INV = "TI"
    SWAP = "SWAP"
    C3 = "C3"


_ARITY = {GateKind.T: 1, GateKind.T_INV: 1, GateKind.SWAP: 2, GateKind.C3: 3}
_GATE_RE = re.compile(r"^\s*(TI|T|SWAP|C3)\s*\(\s*([0-9,;\s]*)\)\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class GateOp:
    """One gate. For C3 the first qubit is the control."""

    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self):
        if len(self.qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind.name} takes {_ARITY[self.kind]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit in {self.kind.name}{self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise IndexError(f"negative qubit index in {self.qubits}")

    @classmethod
    def t(cls, q: int) -> "GateOp":
        return cls(GateKind.T, (q,))

    @classmethod
    def t_inv(cls, q: int) -> "GateOp":
        return cls(GateKind.T_INV, (q,))

    @classmethod
    def swap(cls, a: int, b: int) -> "GateOp":
        return cls(GateKind.SWAP, (a, b))

    @classmethod
    def c3(cls, control: int, a: int, b: int) -> "GateOp":
        return cls(GateKind.C3, (control, a, b))

    @classmethod
    def parse(cls, text: str) -> "GateOp":
        """Parse ``T(3)``, ``TI(3)``, ``SWAP(0,1)`` or ``C3(0;1,2)``."""
        m = _GATE_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse gate {text!r}")
        kind = GateKind(m.group(1).upper())
        qubits = tuple(int(tok) for tok in re.split(r"[,;\s]+", m.group(2).strip()) if tok)
        return cls(kind, qubits)

    def inverse(self) -> "GateOp":
        if self.kind is GateKind.T:
            return GateOp(GateKind.T_INV, self.qubits)
        if self.kind is GateKind.T_INV:
            return GateOp(GateKind.T, self.qubits)
        return self

    def __str__(self) -> str:
        if self.kind is GateKind.C3:
            c, a, b = self.qubits
            return f"C3({c};{a},{b})"
        return f"{self.kind.value}({','.join(map(str, self.qubits))})"


def parse_gates(text: str) -> list[GateOp]:
    """Parse a whitespace separated gate list such as ``"T(2) C3(0;1,2)"``."""
    return [GateOp.parse(tok) for tok in re.findall(r"[A-Za-z0-9]+\([^)]*\)", text)]


def inverse_sequence(gates: Sequence[GateOp]) -> list[GateOp]:
    return [g.inverse() for g in reversed(gates)]


class Tableau:
    """N super-stabilizer generators on N qubits."""

    __slots__ = ("n", "x", "z", "sign")

    def __init__(self, n: int, x: np.ndarray, z: np.ndarray, sign: np.ndarray):
        self.n = n
        self.x = x
        self.z = z
        self.sign = sign

    @classmethod
    def computational(cls, label: BasisOperatorLabel) -> "Tableau":
        n = label.n
        w = gf2.n_words(n)
        eye = gf2.pack_rows(np.eye(n, dtype=np.uint8))
        x = np.zeros((n, w), dtype=np.uint64)
        sign = gf2.pack_rows(np.array([label.bits], dtype=np.uint8))[0]
        return cls(n, x, eye, sign)

    @classmethod
    def from_generators(cls, gens: Sequence[SuperPauli]) -> "Tableau":
        n = len(gens)
        if any(g.n != n for g in gens):
            raise DimensionError("need exactly n generators on n qubits")
        xd = np.array([g.x_bits for g in gens], dtype=np.uint8)
        zd = np.array([g.z_bits for g in gens], dtype=np.uint8)
        sd = np.array([[g.sign for g in gens]], dtype=np.uint8)
        return cls(n, gf2.pack_rows(xd.T), gf2.pack_rows(zd.T), gf2.pack_rows(sd)[0])

    def copy(self) -> "Tableau":
        return Tableau(self.n, self.x.copy(), self.z.copy(), self.sign.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tableau):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
            and np.array_equal(self.sign, other.sign)
        )

    # -- generator views -------------------------------------------------

    def x_matrix(self) -> np.ndarray:
        """Dense (generator, qubit) 0/1 matrix of X components."""
        return gf2.unpack_rows(self.x, self.n).T

    def z_matrix(self) -> np.ndarray:
        return gf2.unpack_rows(self.z, self.n).T

    def sign_bits(self) -> np.ndarray:
        return gf2.unpack_rows(self.sign[None, :], self.n)[0]

    def generators(self) -> list[SuperPauli]:
        xd, zd, sd = self.x_matrix(), self.z_matrix(), self.sign_bits()
        return [
            SuperPauli(self.n, int(sd[a]), bits_to_int(xd[a]), bits_to_int(zd[a]))
            for a in range(self.n)
        ]

    def flip_signs(self, which: Iterable[int]) -> None:
        for a in which:
            self.sign[a // 64] ^= np.uint64(1) << np.uint64(a % 64)

    def check_invariants(self) -> None:
        """Raise AssertionError unless generators commute and are independent."""
        xd = self.x_matrix().astype(np.int64)
        zd = self.z_matrix().astype(np.int64)
        sympl = (xd @ zd.T + zd @ xd.T) % 2
        if sympl.any():
            raise AssertionError("generators do not pairwise commute")
        if gf2.rank(gf2.BitMatrix.from_dense(np.hstack([xd, zd]))) != self.n:
            raise AssertionError("generators are not independent")

    def __str__(self) -> str:
        return "\n".join(str(g) for g in self.generators())

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        xd, zd, sd = self.x_matrix(), self.z_matrix(), self.sign_bits()
        payload = {
            "format": "superclifford.tableau",
            "version": 1,
            "n": self.n,
            "signs": "".join(map(str, sd)),
            "x": ["".join(map(str, row)) for row in xd],
            "z": ["".join(map(str, row)) for row in zd],
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Tableau":
        payload = json.loads(text)
        if payload.get("format") != "superclifford.tableau" or payload.get("version") != 1:
            raise ValueError("not a version-1 tableau document")
        n = payload["n"]

        def dense(rows):
            arr = np.array([[int(c) for c in r] for r in rows], dtype=np.uint8)
            if arr.shape != (n, n):
                raise ValueError("tableau rows have the wrong shape")
            return arr

        xd, zd = dense(payload["x"]), dense(payload["z"])
        sd = np.array([[int(c) for c in payload["signs"]]], dtype=np.uint8)
        if sd.shape != (1, n):
            raise ValueError("sign string has the wrong length")
        return cls(n, gf2.pack_rows(xd.T), gf2.pack_rows(zd.T), gf2.pack_rows(sd)[0])


def new_computational(label: BasisOperatorLabel) -> Tableau:
    """Tableau of an X/Y string: generator a is (-1)**bits[a] Z_a."""
    return Tableau.computational(label)


def _check_range(t: Tableau, qubits: Iterable[int]) -> None:
    for q in qubits:
        if q >= t.n:
            raise IndexError(f"qubit {q} out of range for n={t.n}")


# All rules below read the pre-update rows before writing anything.


def _t(t: Tableau, q) -> None:
    xq, zq = t.x[q].copy(), t.z[q].copy()
    # Z -> -X picks up a sign
    t.sign ^= _XOR.reduce(np.atleast_2d(~xq & zq), axis=0)
    t.x[q], t.z[q] = zq, xq


def _t_inv(t: Tableau, q) -> None:
    xq, zq = t.x[q].copy(), t.z[q].copy()
    # X -> -Z picks up a sign
    t.sign ^= _XOR.reduce(np.atleast_2d(xq & ~zq), axis=0)
    t.x[q], t.z[q] = zq, xq


def _swap(t: Tableau, a, b) -> None:
    t.x[a], t.x[b] = t.x[b].copy(), t.x[a].copy()
    t.z[a], t.z[b] = t.z[b].copy(), t.z[a].copy()


def _c3(t: Tableau, c, a, b) -> None:
    x1, z1 = t.x[c].copy(), t.z[c].copy()
    x2, z2 = t.x[a].copy(), t.z[a].copy()
    x3, z3 = t.x[b].copy(), t.z[b].copy()
    t.sign ^= _XOR.reduce(np.atleast_2d(x1 ^ (x1 & x2) ^ (x1 & x3)), axis=0)
    t.z[c] = z1 ^ x2 ^ z2 ^ x3 ^ z3
    t.x[a] = x2 ^ x1
    t.z[a] = z2 ^ x1
    t.x[b] = x3 ^ x1
    t.z[b] = z3 ^ x1


def apply_gate(t: Tableau, g: GateOp) -> None:
    _check_range(t, g.qubits)
    q = g.qubits
    if g.kind is GateKind.T:
        _t(t, q[0])
    elif g.kind is GateKind.T_INV:
        _t_inv(t, q[0])
    elif g.kind is GateKind.SWAP:
        _swap(t, q[0], q[1])
    else:
        _c3(t, q[0], q[1], q[2])


def apply_layer(t: Tableau, gates: Sequence[GateOp]) -> None:
    """Apply gates acting on pairwise distinct qubits in one vectorized pass.

    Falls back to gate-by-gate application when the supports overlap.
    """
    touched = [q for g in gates for q in g.qubits]
    if len(set(touched)) != len(touched):
        for g in gates:
            apply_gate(t, g)
        return
    _check_range(t, touched)
    by_kind: dict[GateKind, list[tuple[int, ...]]] = {}
    for g in gates:
        by_kind.setdefault(g.kind, []).append(g.qubits)
    if GateKind.T in by_kind:
        _t(t, np.array([q[0] for q in by_kind[GateKind.T]]))
    if GateKind.T_INV in by_kind:
        _t_inv(t, np.array([q[0] for q in by_kind[GateKind.T_INV]]))
    if GateKind.SWAP in by_kind:
        pairs = np.array(by_kind[GateKind.SWAP])
        _swap(t, pairs[:, 0], pairs[:, 1])
    if GateKind.C3 in by_kind:
        tri = np.array(by_kind[GateKind.C3])
        _c3(t, tri[:, 0], tri[:, 1], tri[:, 2])


def apply_sequence(t: Tableau, gates: Sequence[GateOp], reversed_inverse: bool = False) -> None:
    seq = inverse_sequence(gates) if reversed_inverse else gates
    for g in seq:
        apply_gate(t, g)


def apply_layers(t: Tableau, layers: Sequence[Sequence[GateOp]], reversed_inverse: bool = False) -> None:
    """Apply a list of layers; gates inside a layer must commute (disjoint supports)."""
    if reversed_inverse:
        for layer in reversed(layers):
            apply_layer(t, [g.inverse() for g in layer])
    else:
        for layer in layers:
            apply_layer(t, layer)


def canonical_generators(t: Tableau) -> list[SuperPauli]:
    """Reduced row-echelon generating set; equal lists mean equal stabilizer groups."""
    gens = t.generators()
    m = gf2.BitMatrix.from_dense(np.hstack([t.x_matrix(), t.z_matrix()]))

    def mirror(kind, i, j):
        if kind == "swap":
            gens[i], gens[j] = gens[j], gens[i]
        else:
            gens[i] = gens[i] * gens[j]

    gf2.row_echelon_with_callback(m, range(2 * t.n), mirror, reduced=True)
    return gens


__all__ = [
    "GateKind",
    "GateOp",
    "Tableau",
    "apply_gate",
    "apply_layer",
    "apply_layers",
    "apply_sequence",
    "canonical_generators",
    "inverse_sequence",
    "new_computational",
    "parse_gates",
]
