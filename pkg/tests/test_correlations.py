import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renyimi import correlations as co
from renyimi import divergences as dv
from renyimi import hamiltonians as hm
from renyimi.linalg import DensityOperator, kron, product_state, trace_norm
from renyimi.random_instances import SeededGenerator, random_density, random_observable

X, Y, Z, I2 = hm.PAULI_X, hm.PAULI_Y, hm.PAULI_Z, hm.PAULI_I
BELL = DensityOperator.from_vector(np.array([1, 0, 0, 1]) / math.sqrt(2), (2, 2))
ZZ = co.ObservablePair(Z, Z)


def test_product_state_uncorrelated(gen):
    rho = product_state(random_density(2, gen=gen.child(0)), random_density(3, gen=gen.child(1)))
    pair = co.ObservablePair(random_observable(2, gen.child(2)), random_observable(3, gen.child(3)))
    assert co.corr_fn(rho, pair) == pytest.approx(0, abs=1e-12)
    mi, rhs = co.correlation_bound_check(rho, None, pair, 2.0)
    assert mi == pytest.approx(0, abs=1e-10) and rhs == pytest.approx(0, abs=1e-20)


def test_bell_zz():
    assert co.corr_fn(BELL, ZZ) == pytest.approx(1)
    mi, rhs = co.correlation_bound_check(BELL, None, ZZ, 2.0)
    assert mi == pytest.approx(2 * math.log(2)) and rhs == pytest.approx(0.5)


def test_thermal_chain_end_to_end_correlator():
    ham = hm.classical_ising_chain(6, 0.7, 0.3)
    beta = 0.9
    rho, _ = hm.thermal_state(ham, beta)
    p = hm.classical_gibbs(ham, beta)
    z = np.array([1, -1])
    digits = hm._config_digits(6, 2)
    z1, z6 = z[digits[0]], z[digits[5]]
    oracle = np.sum(p * z1 * z6) - np.sum(p * z1) * np.sum(p * z6)
    M_A = kron(Z, I2, I2)
    M_B = kron(I2, I2, Z)
    r = DensityOperator(rho.matrix, (8, 8))
    assert co.corr_fn(r, co.ObservablePair(M_A, M_B)) == pytest.approx(oracle, abs=1e-12)


def test_cut_selects_A(gen):
    a, b = random_density(2, gen=gen.child(0)), random_density(3, gen=gen.child(1))
    rho = DensityOperator(kron(b, a), (3, 2))
    pair = co.ObservablePair(random_observable(2, gen.child(2)), random_observable(3, gen.child(3)))
    assert co.corr_fn(rho, pair, [1]) == pytest.approx(0, abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="do not match"):
        co.corr_fn(BELL, co.ObservablePair(np.eye(3), Z))


def test_zero_observable_rejected():
    with pytest.raises(ValueError, match="zero"):
        co.ObservablePair(np.zeros((2, 2)), Z)


def test_positive_part_identity(gen):
    for i in range(10):
        rho, sigma = random_density(3, gen=gen.child(i, 0)), random_density(3, gen=gen.child(i, 1))
        D = rho.matrix - sigma.matrix
        phi = co.positive_part_projector(D)
        assert np.trace(D @ phi).real == pytest.approx(trace_norm(D) / 2, abs=1e-10)


def test_binary_pinsker_identical(gen):
    rho = random_density(3, gen=gen)
    lhs, rhs = co.binary_pinsker_check(rho, rho, 2.0)
    assert lhs == pytest.approx(0, abs=1e-12) and rhs == pytest.approx(0, abs=1e-20)


@pytest.mark.parametrize("alpha", [0.5, 2.0, 5.0])
def test_binary_pinsker_orthogonal(alpha):
    rho, sigma = DensityOperator(np.diag([1.0, 0])), DensityOperator(np.diag([0, 1.0]))
    lhs, rhs = co.binary_pinsker_check(rho, sigma, alpha)
    assert lhs == math.inf and rhs == pytest.approx(2 * min(1, alpha))


@pytest.mark.parametrize("alpha", [0.5, 2.0, 5.0])
def test_binary_pinsker_random_qubits(gen, alpha):
    for i in range(100):
        rho, sigma = random_density(2, gen=gen.child(i, 0)), random_density(2, gen=gen.child(i, 1))
        lhs, rhs = co.binary_pinsker_check(rho, sigma, alpha)
        assert lhs >= rhs - 1e-9


def test_pinsker_diagonal():
    rho, sigma = DensityOperator(np.diag([0.9, 0.1])), DensityOperator(np.diag([0.5, 0.5]))
    lhs, rhs = co.pinsker_check(rho, sigma, 2.0)
    assert lhs == pytest.approx(math.log(0.81 / 0.5 + 0.01 / 0.5))
    assert rhs == pytest.approx(0.32) and lhs >= rhs


def test_pinsker_random_qutrits(gen):
    for i in range(100):
        rho, sigma = random_density(3, gen=gen.child(i, 0)), random_density(3, gen=gen.child(i, 1))
        lhs, rhs = co.pinsker_check(rho, sigma, 2.0)
        assert lhs >= rhs - 1e-8


def test_pinsker_needs_alpha_above_one():
    with pytest.raises(dv.AlphaRangeError):
        co.pinsker_check(BELL, BELL, 0.5)


def test_correlation_bound_below_one_uses_binary_test(gen):
    rho = random_density(4, gen=gen, dims=(2, 2))
    mi, rhs = co.correlation_bound_check(rho, None, co.ObservablePair(X, Y), 0.5)
    assert mi >= rhs - 1e-12
    assert mi <= dv.mutual_information(rho, [0], "petz", 0.5).value + 1e-9


def test_thermal_tfim_random_pauli_strings(gen):
    ham = hm.transverse_ising_chain(6, 1.0, 0.7)
    H = hm.build_hamiltonian(ham)
    paulis = (I2, X, Y, Z)
    for i in range(20):
        rng = gen.child(i).rng()
        rho, _ = hm.gibbs(H, rng.uniform(0.1, 2.0), ham.dims)
        r = DensityOperator(rho.matrix, (8, 8))
        ops = []
        for _ in range(2):
            idx = rng.integers(0, 4, 3)
            idx[rng.integers(0, 3)] = rng.integers(1, 4)
            ops.append(kron(*(paulis[j] for j in idx)))
        mi, rhs = co.correlation_bound_check(r, None, co.ObservablePair(*ops), 2.0)
        assert mi >= rhs - 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-10, 10).filter(lambda c: abs(c) > 1e-3))
def test_holder_and_rescaling(seed, c):
    g = SeededGenerator(seed)
    rho = random_density(6, gen=g.child(0), dims=(2, 3))
    pair = co.ObservablePair(random_observable(2, g.child(1)), random_observable(3, g.child(2)))
    C = co.corr_fn(rho, pair)
    assert abs(C) <= 2 * pair.norm_A * pair.norm_B + 1e-9
    scaled = co.ObservablePair(c * pair.M_A, pair.M_B)
    r1 = co.correlation_bound_rhs(C, pair, 2.0)
    r2 = co.correlation_bound_rhs(co.corr_fn(rho, scaled), scaled, 2.0)
    assert r2 == pytest.approx(r1, rel=1e-9, abs=1e-15)
