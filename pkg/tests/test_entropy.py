import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superclifford.checks import random_circuit
from superclifford.entropy import Region, entropy_profile, prefix_entropy, region_entropy
from superclifford.oracle import dense_entropy, dense_evolve
from superclifford.pauli import BasisOperatorLabel
from superclifford.tableau import GateOp, apply_sequence, new_computational

from conftest import circuits


def evolved(label, gates):
    t = new_computational(label)
    apply_sequence(t, gates)
    return t


@pytest.mark.parametrize("bits", ["0000", "1011", "0110"])
def test_computational_tableau_has_zero_entropy(bits):
    t = new_computational(BasisOperatorLabel.parse(bits))
    assert entropy_profile(t) == [0, 0, 0]


def test_t_then_c3():
    t = evolved(BasisOperatorLabel.zeros(3), [GateOp.t(0), GateOp.c3(0, 1, 2)])
    assert prefix_entropy(t, 1) == 1


def test_c3_alone_trivial():
    t = evolved(BasisOperatorLabel.zeros(3), [GateOp.c3(0, 1, 2)])
    assert prefix_entropy(t, 1) == 0


def test_region_examples(rng):
    label = BasisOperatorLabel.zeros(5)
    gates = random_circuit(5, 40, rng)
    t = evolved(label, gates)
    assert region_entropy(t, [0, 1]) == prefix_entropy(t, 2)
    assert region_entropy(t, [1, 3]) == pytest.approx(dense_entropy(dense_evolve(label, gates), [1, 3]))


@settings(max_examples=150, deadline=None)
@given(circuits(min_n=2, max_n=8, max_len=40), st.data())
def test_matches_schmidt_and_complement(case, data):
    label, gates = case
    n = label.n
    region = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    t = evolved(label, gates)
    s = region_entropy(t, region)
    assert s == pytest.approx(dense_entropy(dense_evolve(label, gates), sorted(region)), abs=1e-8)
    assert s == region_entropy(t, Region.of(region, n).complement(n))
    assert 0 <= s <= min(len(region), n - len(region))


@settings(max_examples=60, deadline=None)
@given(circuits(min_n=2, max_n=10, max_len=60), st.integers(0, 2**10 - 1))
def test_sign_and_basis_invariance(case, other_bits):
    label, gates = case
    n = label.n
    t = evolved(label, gates)
    other = evolved(BasisOperatorLabel(tuple((other_bits >> i) & 1 for i in range(n))), gates)
    flipped = t.copy()
    flipped.flip_signs(range(0, n, 2))
    assert entropy_profile(t) == entropy_profile(other) == entropy_profile(flipped)


def test_region_validation():
    t = new_computational(BasisOperatorLabel.zeros(4))
    with pytest.raises(ValueError):
        prefix_entropy(t, 0)
    with pytest.raises(ValueError):
        prefix_entropy(t, 4)
    with pytest.raises(ValueError):
        region_entropy(t, [0, 1, 2, 3])
    with pytest.raises(IndexError):
        region_entropy(t, [5])


def test_large_prefix_bounded(rng):
    from superclifford.ensembles import sample_parallel_step

    t = new_computational(BasisOperatorLabel.zeros(400))
    for _ in range(150):
        from superclifford.tableau import apply_layer

        apply_layer(t, sample_parallel_step(400, rng))
    s = prefix_entropy(t, 100)
    assert 80 <= s <= 100
