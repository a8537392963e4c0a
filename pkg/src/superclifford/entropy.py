"""Operator entanglement entropy from GF(2) ranks.

For a region A the entropy (base 2) is ``rank(V_A) - |A|`` where ``V_A`` stacks
the X and Z component rows of the qubits in A across all N generators. Values
are exact integers; signs play no role.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import gf2
from .tableau import Tableau


@dataclass(frozen=True)
class Region:
    qubits: tuple[int, ...]

    @classmethod
    def of(cls, qubits: Iterable[int], n: int) -> "Region":
        q = tuple(sorted(set(int(i) for i in qubits)))
        if not q or len(q) >= n:
            raise ValueError(f"region must be a nonempty strict subset of {n} qubits, got {q}")
        if q[0] < 0 or q[-1] >= n:
            raise IndexError(f"region {q} out of range for n={n}")
        return cls(q)

    @classmethod
    def prefix(cls, n_a: int, n: int) -> "Region":
        return cls.of(range(n_a), n)

    def complement(self, n: int) -> "Region":
        return Region.of(set(range(n)) - set(self.qubits), n)

    def __len__(self) -> int:
        return len(self.qubits)


def _rows_entropy(t: Tableau, rows: np.ndarray, n_a: int) -> int:
    return gf2.rank_words(rows, t.n) - n_a


def prefix_entropy(t: Tableau, n_a: int) -> int:
    """Entropy of the first ``n_a`` qubits."""
    if not 1 <= n_a < t.n:
        raise ValueError(f"n_a must satisfy 1 <= n_a < {t.n}, got {n_a}")
    rows = np.concatenate([t.x[:n_a], t.z[:n_a]])
    return _rows_entropy(t, rows, n_a)


def region_entropy(t: Tableau, a: Region | Iterable[int]) -> int:
    if not isinstance(a, Region):
        a = Region.of(a, t.n)
    elif not a.qubits or len(a.qubits) >= t.n or a.qubits[-1] >= t.n:
        raise ValueError(f"invalid region {a.qubits} for n={t.n}")
    idx = np.array(a.qubits)
    rows = np.concatenate([t.x[idx], t.z[idx]])
    return _rows_entropy(t, rows, len(idx))


def entropy_profile(t: Tableau) -> list[int]:
    """Prefix entropies for every cut 1..N-1."""
    return [prefix_entropy(t, k) for k in range(1, t.n)]


__all__ = ["Region", "entropy_profile", "prefix_entropy", "region_entropy"]
