"""Random circuit families and reproducible seeding.

Randomness comes from numpy's PCG64 bit generator. Each realization gets its
own seed derived from the master seed with SplitMix64 (see
:func:`realization_seed`), so results do not depend on how realizations are
scheduled across workers.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .tableau import GateOp

SPEC_SCHEMA_VERSION = 1
_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class Family(str, enum.Enum):
    PARALLEL = "parallel"
    NEAREST_NEIGHBOR = "nearest_neighbor"


def _splitmix64_mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def realization_seed(master_seed: int, realization_index: int) -> int:
    """The ``index``-th SplitMix64 output for state ``master_seed``.

    seed = mix(master + (index + 1) * 0x9E3779B97F4A7C15 mod 2^64), where mix is
    the SplitMix64 finalizer. Distinct indices below 2^64 give distinct seeds.
    """
    if realization_index < 0:
        raise ValueError("realization index must be nonnegative")
    state = (master_seed + (realization_index + 1) * _GOLDEN) & _MASK64
    return _splitmix64_mix(state)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def sample_parallel_step(n: int, rng: np.random.Generator) -> list[GateOp]:
    """One time step of the all-to-all parallel circuit.

    N/10 distinct qubits are drawn; three quarters of them are grouped into
    random triples, each hit by C3 with a uniformly chosen control, and T acts
    on the rest.
    """
    if n <= 0 or n % 40:
        raise ConfigError(f"parallel circuit needs N divisible by 40, got {n}")
    size = n // 10
    n_c3 = 3 * size // 4
    gamma = rng.permutation(n)[:size]
    triples = gamma[:n_c3].reshape(-1, 3)
    controls = rng.integers(0, 3, size=len(triples))
    gates = []
    for tri, c in zip(triples.tolist(), controls.tolist()):
        targets = [q for i, q in enumerate(tri) if i != c]
        gates.append(GateOp.c3(tri[c], targets[0], targets[1]))
    gates.extend(GateOp.t(int(q)) for q in gamma[n_c3:])
    return gates


def sample_nn_step(n: int, rng: np.random.Generator) -> list[GateOp]:
    """T on a random qubit, then C3 on a random window (j, j+1, j+2) with random control."""
    if n < 3:
        raise ConfigError(f"nearest-neighbour circuit needs N >= 3, got {n}")
    q = int(rng.integers(0, n))
    j = int(rng.integers(0, n - 2))
    c = int(rng.integers(0, 3))
    window = [j, j + 1, j + 2]
    control = window.pop(c)
    return [GateOp.t(q), GateOp.c3(control, window[0], window[1])]


def sample_step(family: Family, n: int, rng: np.random.Generator) -> list[GateOp]:
    if family is Family.PARALLEL:
        return sample_parallel_step(n, rng)
    return sample_nn_step(n, rng)


def sample_circuit(family: Family, n: int, steps: int, rng: np.random.Generator) -> list[list[GateOp]]:
    return [sample_step(family, n, rng) for _ in range(steps)]


def default_horizon(n: int) -> int:
    return math.ceil(40 * math.log(n))


def default_cadence(n: int) -> int:
    return 1 if n <= 520 else 5


def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(1000)
    return Fraction(str(value))


@dataclass
class EnsembleSpec:
    n_qubits: int
    family: Family = Family.PARALLEL
    realizations: int = 100
    max_t: int | None = None
    master_seed: int = 0
    entropy_fraction: Fraction = field(default_factory=lambda: Fraction(1, 4))
    epsilon: float = 10.0
    entropy_cadence: int | None = None

    def __post_init__(self):
        self.family = Family(self.family)
        self.entropy_fraction = _fraction(self.entropy_fraction)
        if self.max_t is None:
            self.max_t = default_horizon(self.n_qubits)
        if self.entropy_cadence is None:
            self.entropy_cadence = default_cadence(self.n_qubits)
        self.validate()

    def validate(self) -> None:
        n = self.n_qubits
        if self.family is Family.PARALLEL and (n <= 0 or n % 40):
            raise ConfigError(f"parallel circuit needs N divisible by 40, got {n}")
        if self.family is Family.NEAREST_NEIGHBOR and n < 3:
            raise ConfigError(f"nearest-neighbour circuit needs N >= 3, got {n}")
        if not 0 < self.entropy_fraction < Fraction(1, 2):
            raise ConfigError(f"entropy fraction must lie in (0, 1/2), got {self.entropy_fraction}")
        if self.region_size < 1:
            raise ConfigError(f"region floor(m N) is empty for m={self.entropy_fraction}, N={n}")
        if self.realizations < 1:
            raise ConfigError("need at least one realization")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.max_t < 0:
            raise ConfigError("time horizon must be nonnegative")
        if self.entropy_cadence < 1:
            raise ConfigError("entropy cadence must be >= 1")
        if not 0 <= self.master_seed <= _MASK64:
            raise ConfigError("master seed must fit in 64 bits")

    @property
    def region_size(self) -> int:
        return math.floor(self.entropy_fraction * self.n_qubits)

    @property
    def saturation(self) -> int:
        return self.region_size

    def record_times(self) -> list[int]:
        times = list(range(0, self.max_t + 1, self.entropy_cadence))
        if times[-1] != self.max_t:
            times.append(self.max_t)
        return times

    def replace(self, **changes) -> "EnsembleSpec":
        data = self.to_dict()
        data.update(changes)
        return EnsembleSpec.from_dict(data)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["family"] = self.family.value
        data["entropy_fraction"] = str(self.entropy_fraction)
        data["schema_version"] = SPEC_SCHEMA_VERSION
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "EnsembleSpec":
        data = dict(data)
        version = data.pop("schema_version", SPEC_SCHEMA_VERSION)
        if version != SPEC_SCHEMA_VERSION:
            raise ConfigError(f"unsupported ensemble schema version {version}")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown ensemble fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "EnsembleSpec":
        return cls.from_dict(json.loads(text))


def realization_circuit(spec: EnsembleSpec, index: int, steps: int | None = None) -> list[list[GateOp]]:
    rng = make_rng(realization_seed(spec.master_seed, index))
    return sample_circuit(spec.family, spec.n_qubits, spec.max_t if steps is None else steps, rng)


def gamma_counts(n: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    """How often each qubit is touched by a parallel step over ``samples`` steps."""
    counts = np.zeros(n, dtype=np.int64)
    for _ in range(samples):
        for g in sample_parallel_step(n, rng):
            counts[list(g.qubits)] += 1
    return counts


__all__ = [
    "ConfigError",
    "EnsembleSpec",
    "Family",
    "default_cadence",
    "default_horizon",
    "gamma_counts",
    "make_rng",
    "realization_circuit",
    "realization_seed",
    "sample_circuit",
    "sample_nn_step",
    "sample_parallel_step",
    "sample_step",
]
