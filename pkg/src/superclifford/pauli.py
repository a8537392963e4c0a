"""Super-Pauli strings acting on the X/Y operator subspace.

A super-Pauli on ``n`` sites is stored as a sign bit plus two bitsets held in
Python ints (bit ``i`` is site ``i``). It stands for

    (-1)**sign * X_0**x_0 Z_0**z_0 * X_1**x_1 Z_1**z_1 * ...

with the X factor written before the Z factor on every site. All sign rules in
this package are relative to that ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class DimensionError(ValueError):
    """Operands act on different numbers of sites."""


def bits_to_int(bits: Sequence[int]) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b:
            out |= 1 << i
    return out


def int_to_bits(value: int, n: int) -> list[int]:
    return [(value >> i) & 1 for i in range(n)]


@dataclass(frozen=True)
class SuperPauli:
    n: int
    sign: int
    x: int
    z: int

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"need at least one site, got n={self.n}")
        if self.sign not in (0, 1):
            raise ValueError(f"sign must be 0 or 1, got {self.sign}")
        if self.x >> self.n or self.z >> self.n or self.x < 0 or self.z < 0:
            raise ValueError("bitset has bits outside the n sites")

    @classmethod
    def from_bits(cls, sign: int, x_bits: Sequence[int], z_bits: Sequence[int]) -> "SuperPauli":
        if len(x_bits) != len(z_bits):
            raise DimensionError("x_bits and z_bits differ in length")
        return cls(len(x_bits), int(sign), bits_to_int(x_bits), bits_to_int(z_bits))

    @classmethod
    def identity(cls, n: int) -> "SuperPauli":
        return cls(n, 0, 0, 0)

    @classmethod
    def parse(cls, text: str) -> "SuperPauli":
        """Inverse of ``str``: e.g. ``"-XZ.X."`` is -X_0 Z_0 X_1."""
        sign = 0
        if text[:1] in "+-":
            sign = int(text[0] == "-")
            text = text[1:]
        if len(text) % 2:
            raise ValueError(f"odd number of glyphs in {text!r}")
        x_bits = [int(c == "X") for c in text[0::2]]
        z_bits = [int(c == "Z") for c in text[1::2]]
        return cls.from_bits(sign, x_bits, z_bits)

    @property
    def x_bits(self) -> list[int]:
        return int_to_bits(self.x, self.n)

    @property
    def z_bits(self) -> list[int]:
        return int_to_bits(self.z, self.n)

    def is_z_type(self) -> bool:
        return self.x == 0

    def __mul__(self, other: "SuperPauli") -> "SuperPauli":
        return multiply(self, other)

    def __str__(self) -> str:
        glyphs = []
        for i in range(self.n):
            glyphs.append("X" if (self.x >> i) & 1 else ".")
            glyphs.append("Z" if (self.z >> i) & 1 else ".")
        return ("-" if self.sign else "+") + "".join(glyphs)


@dataclass(frozen=True)
class BasisOperatorLabel:
    """One X/Y string: bit ``i`` is 0 for X and 1 for Y at site ``i``."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits:
            raise DimensionError("label needs at least one site")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"label bits must be 0/1, got {self.bits}")

    @classmethod
    def zeros(cls, n: int) -> "BasisOperatorLabel":
        return cls((0,) * n)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "BasisOperatorLabel":
        """Accepts a 0/1 string ("100") or an X/Y string ("YXX").

        When ``n`` is given the label is right-padded with zeros (X) to ``n`` sites,
        so ``parse("1", 120)`` is Y_0 X_1 ... X_119.
        """
        table = {"0": 0, "1": 1, "X": 0, "Y": 1, "x": 0, "y": 1}
        try:
            bits = [table[c] for c in text.strip()]
        except KeyError as exc:
            raise ValueError(f"bad basis label {text!r}") from exc
        if n is not None:
            if len(bits) > n:
                raise DimensionError(f"label {text!r} longer than n={n}")
            bits += [0] * (n - len(bits))
        return cls(tuple(bits))

    @property
    def n(self) -> int:
        return len(self.bits)

    def as_int(self) -> int:
        return bits_to_int(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def _check_same_n(a: SuperPauli, b: SuperPauli) -> None:
    if a.n != b.n:
        raise DimensionError(f"operands act on {a.n} and {b.n} sites")


def multiply(a: SuperPauli, b: SuperPauli) -> SuperPauli:
    """Product ``a * b`` brought back to canonical X-before-Z order.

    Moving each X of ``b`` left past a Z of ``a`` on the same site costs one
    factor of -1, so the sign picks up ``popcount(a.z & b.x)``.
    """
    _check_same_n(a, b)
    flips = (a.z & b.x).bit_count() & 1
    return SuperPauli(a.n, a.sign ^ b.sign ^ flips, a.x ^ b.x, a.z ^ b.z)


def symplectic_commutes(a: SuperPauli, b: SuperPauli) -> bool:
    _check_same_n(a, b)
    return ((a.x & b.z) ^ (a.z & b.x)).bit_count() % 2 == 0


def square_sign(a: SuperPauli) -> int:
    """Sign bit of ``a * a`` (always the identity up to this sign)."""
    return (a.x & a.z).bit_count() & 1


__all__ = [
    "BasisOperatorLabel",
    "DimensionError",
    "SuperPauli",
    "bits_to_int",
    "int_to_bits",
    "multiply",
    "square_sign",
    "symplectic_commutes",
]
