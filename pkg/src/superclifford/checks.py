"""Differential properties comparing the tableau machinery with the dense oracles.

Each check returns a :class:`CheckResult`; ``run_all`` is what the
``oracle-check`` subcommand executes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import oracle
from .entropy import region_entropy
from .otoc import V_CATALOG, echo_tableau, inner_product_reference, inner_product_with_basis
from .pauli import BasisOperatorLabel
from .tableau import GateOp, Tableau, apply_gate, new_computational


@dataclass
class CheckResult:
    name: str
    cases: int
    failures: int = 0
    worst: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.cases} cases, {self.failures} failures, worst={self.worst:.3g}"


def random_gate(n: int, rng: np.random.Generator) -> GateOp:
    kinds = ["T", "TI"] + (["SWAP"] if n >= 2 else []) + (["C3", "C3"] if n >= 3 else [])
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "T":
        return GateOp.t(int(rng.integers(n)))
    if kind == "TI":
        return GateOp.t_inv(int(rng.integers(n)))
    if kind == "SWAP":
        a, b = rng.choice(n, 2, replace=False)
        return GateOp.swap(int(a), int(b))
    c, a, b = rng.choice(n, 3, replace=False)
    return GateOp.c3(int(c), int(a), int(b))


def random_circuit(n: int, length: int, rng: np.random.Generator) -> list[GateOp]:
    return [random_gate(n, rng) for _ in range(length)]


def random_label(n: int, rng: np.random.Generator) -> BasisOperatorLabel:
    return BasisOperatorLabel(tuple(int(b) for b in rng.integers(0, 2, n)))


def check_stabilization(sizes, cases: int, rng, length: int = 40, tol: float = 1e-10) -> CheckResult:
    """After every gate each generator must fix the dense super-state."""
    res = CheckResult("tableau_stabilizes_superstate", 0)
    for n in sizes:
        for _ in range(cases):
            label = random_label(n, rng)
            tab = new_computational(label)
            state = oracle.DenseSuperState.from_label(label)
            bad = 0.0
            for g in random_circuit(n, length, rng):
                apply_gate(tab, g)
                state = oracle.dense_apply(state, g)
                bad = max(bad, oracle.stabilizer_residual(tab, state))
            res.cases += 1
            res.worst = max(res.worst, bad)
            if bad > tol:
                res.failures += 1
    return res


def check_physical_conjugation(sizes, cases: int, rng, length: int = 50, tol: float = 1e-10) -> CheckResult:
    """Literal G^dagger W G conjugation agrees with super-state evolution amplitude by amplitude."""
    res = CheckResult("physical_conjugation_matches_superstate", 0)
    for n in sizes:
        for _ in range(cases):
            label = random_label(n, rng)
            gates = random_circuit(n, length, rng)
            w = oracle.conjugation_oracle(label, gates)
            proj, leak = oracle.operator_to_superstate(w, n)
            dense = oracle.dense_evolve(label, gates)
            err = max(leak, float(np.max(np.abs(proj.amplitudes - dense.amplitudes))))
            res.cases += 1
            res.worst = max(res.worst, err)
            if err > tol:
                res.failures += 1
    return res


def _flip_random_signs(tab: Tableau, rng) -> Tableau:
    out = tab.copy()
    out.flip_signs(np.flatnonzero(rng.integers(0, 2, tab.n)))
    return out


def check_entropy(sizes, cases: int, rng, length: int = 40, tol: float = 1e-8) -> CheckResult:
    """Rank entropy equals Schmidt entropy; sign flips and the initial basis label change nothing."""
    res = CheckResult("entropy_matches_schmidt", 0)
    for n in sizes:
        if n < 2:
            continue
        for _ in range(cases):
            label = random_label(n, rng)
            gates = random_circuit(n, length, rng)
            tab = new_computational(label)
            for g in gates:
                apply_gate(tab, g)
            k = int(rng.integers(1, n))
            region = sorted(int(q) for q in rng.choice(n, k, replace=False))
            exact = region_entropy(tab, region)
            dense = oracle.dense_entropy(oracle.dense_evolve(label, gates), region)
            other = new_computational(random_label(n, rng))
            for g in gates:
                apply_gate(other, g)
            flipped = _flip_random_signs(tab, rng)
            err = abs(exact - dense)
            ok = (
                err <= tol
                and region_entropy(flipped, region) == exact
                and region_entropy(other, region) == exact
            )
            res.cases += 1
            res.worst = max(res.worst, err)
            if not ok:
                res.failures += 1
    return res


def check_otoc(sizes, cases: int, rng, length: int = 30, tol: float = 1e-10) -> CheckResult:
    """Echo-tableau OTOC equals the literal trace formula."""
    res = CheckResult("otoc_matches_trace_formula", 0)
    v_choices = [V_CATALOG["C3"], V_CATALOG["T3C3"]]
    for n in sizes:
        if n < 3:
            continue
        for c in range(cases):
            v = v_choices[c % 2]
            if c % 4 < 2:
                w0 = BasisOperatorLabel.zeros(n)
            elif c % 4 == 2:
                w0 = BasisOperatorLabel((1,) + (0,) * (n - 1))
            else:
                w0 = random_label(n, rng)
            gates = random_circuit(n, int(rng.integers(0, length + 1)), rng)
            exact = inner_product_with_basis(echo_tableau(gates, v, w0), BasisOperatorLabel.zeros(n))
            ref = oracle.trace_otoc(w0, gates, v)
            err = abs(ref - exact.value)
            res.cases += 1
            res.worst = max(res.worst, err)
            if err > tol:
                res.failures += 1
    return res


def check_inner_product_kernel(sizes, cases: int, rng, length: int = 60) -> CheckResult:
    """Compiled overlap kernel agrees with the generator-mirroring reference."""
    res = CheckResult("inner_product_kernel_matches_reference", 0)
    for n in sizes:
        for _ in range(cases):
            tab = new_computational(random_label(n, rng))
            for g in random_circuit(n, length, rng):
                apply_gate(tab, g)
            target = random_label(n, rng)
            res.cases += 1
            if inner_product_with_basis(tab, target) != inner_product_reference(tab, target):
                res.failures += 1
    return res


def run_all(max_n: int = 8, cases: int = 20, seed: int = 0,
            progress: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    if max_n > oracle.MAX_SUPER_N:
        raise oracle.SizeLimitError(f"oracle checks are limited to n <= {oracle.MAX_SUPER_N}, got {max_n}")
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    rng = np.random.default_rng(seed)
    super_sizes = range(1, max_n + 1)
    phys_sizes = range(1, min(max_n, oracle.MAX_PHYSICAL_N) + 1)
    runs = [
        lambda: check_stabilization(super_sizes, cases, rng),
        lambda: check_physical_conjugation(phys_sizes, cases, rng),
        lambda: check_entropy(super_sizes, cases, rng),
        lambda: check_otoc(phys_sizes, cases, rng),
        lambda: check_inner_product_kernel(super_sizes, cases, rng),
    ]
    results = []
    for run in runs:
        r = run()
        results.append(r)
        if progress is not None:
            progress(r)
    return results


__all__ = [
    "CheckResult",
    "check_entropy",
    "check_inner_product_kernel",
    "check_otoc",
    "check_physical_conjugation",
    "check_stabilization",
    "random_circuit",
    "random_gate",
    "random_label",
    "run_all",
]
