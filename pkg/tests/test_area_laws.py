import math

import numpy as np
import pytest

from renyimi import area_laws as al
from renyimi import hamiltonians as hm
from renyimi.random_instances import random_classical_ising, random_commuting_chain, random_local_hamiltonian

LOG2 = math.log(2)


def classical_imax(ham, A, beta):
    """Independent I_inf of a classical Gibbs state: log max_x p(x) / (p_A(x_A) p_B(x_B))."""
    p = hm.classical_gibbs(ham, beta)
    n = ham.n_sites
    B = [i for i in range(n) if i not in A]
    T = p.reshape([2] * n).transpose(list(A) + B).reshape(2 ** len(A), 2 ** len(B))
    pa, pb = T.sum(1), T.sum(0)
    return float(np.log((T / np.outer(pa, pb)).max()))


def test_thm1_classical_ring():
    ham = hm.classical_ising_chain(8, 1.0, 0.0, periodic=True)
    cert = al.certify(ham, [0, 1, 2, 3], 1.0)
    b = cert.bound("thm1_commuting")
    assert b.applicable and b.value == pytest.approx(8.0)
    assert cert.computed.value == pytest.approx(classical_imax(ham, [0, 1, 2, 3], 1.0), abs=1e-9)
    assert cert.passed


def test_thm1_zero_interaction():
    ham = hm.LatticeHamiltonian(tuple((i,) for i in range(4)), 2, tuple(hm.LocalTerm((i,), hm.PAULI_Z) for i in range(4)))
    cert = al.certify(ham, [0, 1], 0.7)
    assert cert.bound("thm1_commuting").value == 0
    assert cert.bound("lemma1").value == pytest.approx(0, abs=1e-12)
    assert cert.computed.value == pytest.approx(0, abs=1e-10)
    # product thermal state: every margin equals its bound
    for b in cert.bounds:
        if b.applicable and math.isfinite(b.value):
            assert cert.margin(b) == pytest.approx(b.value, abs=1e-10)


def test_thm1_high_temperature_limit():
    ham = hm.classical_ising_chain(6, 1.0, 0.3)
    vals = [al.certify(ham, [0, 1, 2], b) for b in (1e-2, 1e-4)]
    assert vals[1].bound("thm1_commuting").value < vals[0].bound("thm1_commuting").value < 0.05
    # I_inf vanishes linearly in beta, below the bound at each temperature
    assert vals[1].computed.value < vals[0].computed.value * 0.02
    assert all(c.passed for c in vals)


def test_thm1_inapplicable_noncommuting():
    assert not al.thm1_bound(hm.transverse_ising_chain(4, 1, 1), [0, 1], 0.5).applicable


def test_lemma1_below_thm1_when_commuting(gen):
    ham = random_commuting_chain(6, gen=gen)
    cut, beta = [0, 1, 2], 1.0
    assert al.lemma1_bound(ham, cut, beta).value <= al.thm1_bound(ham, cut, beta).value + 1e-9


def test_lemma1_transverse_ising():
    cert = al.certify(hm.transverse_ising_chain(8, 1.0, 0.8), [0, 1, 2, 3], 0.5)
    assert cert.bound("lemma1").applicable and cert.holds(cert.bound("lemma1"))


def test_thm2_zero_temperature_zero():
    assert al.thm2_log_bound(1.0, 2, 0.0) == -math.inf
    assert al.thm2_bound(hm.transverse_ising_chain(4, 1, 1), 0.0).value == 0.0


def test_thm2_formula():
    J, l, beta = 1.0, 2, 0.05
    f = 4 * beta * J * l * l * math.exp(1 + 4 * beta * J * l)
    assert math.exp(al.thm2_log_bound(J, l, beta)) == pytest.approx(4 * f * math.exp(f), rel=1e-12)


@pytest.mark.parametrize("m", range(1, 8))
def test_thm2_every_cut(m):
    ham = hm.transverse_ising_chain(8, 0.4, 0.2)  # J = 1, l = 2
    assert ham.J == pytest.approx(1.0) and ham.l == 2
    cert = al.certify(ham, list(range(m)), 0.05)
    b = cert.bound("thm2_1d")
    assert b.applicable and cert.holds(b)


def test_thm2_size_independent():
    mis = []
    for n in (4, 6, 8):
        ham = hm.transverse_ising_chain(n, 0.4, 0.2)
        cert = al.certify(ham, list(range(n // 2)), 0.05)
        assert cert.passed
        mis.append(cert.computed.value)
    bounds = [al.thm2_bound(hm.transverse_ising_chain(n, 0.4, 0.2), 0.05).value for n in (6, 10)]
    assert bounds[0] == pytest.approx(bounds[1])
    assert abs(mis[2] - mis[1]) <= abs(mis[1] - mis[0]) + 1e-12


def test_thm2_overflow_checked_in_log_space():
    ham = hm.transverse_ising_chain(4, 1.0, 1.0)
    cert = al.certify(ham, [0, 1], 3.0)
    b = cert.bound("thm2_1d")
    assert b.value == math.inf and math.isfinite(b.log_value)
    assert cert.holds(b)


def test_thm2_inapplicable_on_ring_or_middle_block():
    assert not al.thm2_bound(hm.transverse_ising_chain(6, 1, 1, periodic=True), 0.1).applicable
    assert not al.thm2_bound(hm.transverse_ising_chain(6, 1, 1), 0.1, [2, 3]).applicable


def test_thm3_grid_column():
    ham = hm.grid_ising(3, 3, 0.5, 0.5)
    A = [i for i, (r, c) in enumerate(ham.coords) if c == 0]
    beta = 0.5 / (ham.J * ham.k)
    cert = al.certify(ham, A, beta)
    b = cert.bound("thm3_highT")
    assert b.applicable
    assert b.value == pytest.approx(4 * LOG2 * 3 / ham.k)
    assert cert.holds(b)


def test_thm3_validity_edge():
    ham = hm.transverse_ising_chain(4, 1.0, 1.0)
    beta = 1 / (ham.J * ham.k)
    assert not al.thm3_bound(ham, [0, 1], beta).applicable
    assert al.thm3_bound(ham, [0, 1], 0.0).value == 0.0


def test_certify_commuting_chain(gen):
    cert = al.certify(random_commuting_chain(6, gen=gen), [0, 1, 2], 0.8)
    for name in ("lemma1", "thm1_commuting"):
        b = cert.bound(name)
        assert b.applicable and cert.margin(b) >= 0


def test_certify_high_temperature_tfim():
    cert = al.certify(hm.transverse_ising_chain(6, 0.3, 0.3), [0, 1, 2], 0.1)
    assert {b.name for b in cert.bounds if b.applicable} == {"lemma1", "thm2_1d", "thm3_highT"}
    assert cert.passed


@pytest.mark.parametrize("variant,alpha", [("measured", 2.0), ("sandwiched", 2.0), ("sandwiched", 3.0), ("petz", 1.5), ("umegaki", None)])
def test_hierarchy_weaker_variants_pass(gen, variant, alpha):
    ham = random_local_hamiltonian(5, gen=gen, scale=0.5)
    top = al.certify(ham, [0, 1], 0.4)
    low = al.certify(ham, [0, 1], 0.4, variant, alpha)
    assert low.computed.value <= top.computed.value + 1e-9
    assert top.passed and low.passed


def test_entropy_variant_not_covered():
    cert = al.certify(hm.transverse_ising_chain(4, 1, 1), [0, 1], 0.3, "entropy_alpha", 2.0)
    assert not any(b.applicable for b in cert.bounds)


def test_strict_raises_on_violation(monkeypatch):
    monkeypatch.setattr(al, "lemma1_bound", lambda *a: al.Bound("lemma1", -1.0, True))
    with pytest.raises(al.BoundViolation):
        al.certify(hm.transverse_ising_chain(4, 1, 1), [0, 1], 0.3, strict=True)


# ---------------------------------------------------------------- classical area law


def test_thm4_infinite_temperature():
    cert = al.thm4_classical_check(hm.classical_ising_chain(6, 1.0, 0.5), [0, 1, 2], 0.0, 2.0)
    assert cert.computed.value == pytest.approx(0, abs=1e-12) and cert.passed


@pytest.mark.parametrize("J,h,beta", [(1.0, 0.0, 1.0), (-1.5, 0.4, 2.0), (0.7, -0.9, 3.0), (2.0, 0.1, 5.0)])
def test_thm4_ring_arcs(J, h, beta):
    ham = hm.classical_ising_chain(8, J, h, periodic=True)
    cert = al.thm4_classical_check(ham, [0, 1, 2, 3], beta, 2.0)
    b = cert.bounds[0]
    assert b.value == pytest.approx(4 * LOG2)
    assert cert.passed


def test_thm4_inapplicable_above_two():
    cert = al.thm4_classical_check(hm.classical_ising_chain(6, 1.0, 0.5), [0, 1, 2], 1.0, 3.0)
    assert not cert.bounds[0].applicable


def test_epsilon_counterexample():
    eps = 1e-4
    val = al.epsilon_counterexample(eps, 3.0)
    assert val == pytest.approx(0.5 * math.log(1 / eps + 1 / (1 - eps)), rel=1e-12)
    assert val > 2 * LOG2 + 1


@pytest.mark.parametrize("alpha", [0.5, 2.0, 1.5])
def test_boundary_equivalence_chain(alpha):
    ham = hm.classical_ising_chain(8, 0.9, 0.3)
    lhs, rhs = al.boundary_equivalence_check(ham, [0, 1, 2, 3], 1.2, alpha)
    assert lhs == pytest.approx(rhs, abs=1e-9)
    assert lhs > 1e-3


def test_boundary_equivalence_free_spins():
    ham = hm.classical_ising_chain(6, 0.0, 0.7)
    lhs, rhs = al.boundary_equivalence_check(ham, [0, 1, 2], 1.0, 2.0)
    assert lhs == pytest.approx(0, abs=1e-12) and rhs == pytest.approx(0, abs=1e-12)


def test_boundary_equivalence_random_ring(gen):
    ham = random_classical_ising(10, gen=gen)
    lhs, rhs = al.boundary_equivalence_check(ham, [0, 1, 2, 3, 4], 1.0, 2.0)
    assert lhs == pytest.approx(rhs, abs=1e-9)


# ---------------------------------------------------------------- proof quantities


@pytest.mark.parametrize("beta", [0.2, 0.8])
def test_dyson_bound(gen, beta):
    for i in range(3):
        ham = random_local_hamiltonian(5, gen=gen.child(i), scale=0.6)
        assert al.dyson_check(ham, [0, 1], beta).holds()


def test_dyson_commuting_exact():
    # commuting: the integrand is constant, the bound is beta ||H_I||, and ||E|| attains it
    ham = hm.classical_ising_chain(4, 0.8, 0.0)
    chk = al.dyson_check(ham, [0, 1], 0.9)
    assert chk.log_bound == pytest.approx(0.9 * 0.8)
    assert chk.log_norm == pytest.approx(chk.log_bound, abs=1e-12)


def test_partition_ratio(gen):
    for i in range(4):
        ham = random_local_hamiltonian(5, gen=gen.child(i))
        lhs, rhs = al.partition_ratio_check(ham, [0, 1], 0.7)
        assert lhs <= rhs + 1e-9


def test_nested_commutators(gen):
    for i in range(3):
        ham = random_local_hamiltonian(6, gen=gen.child(i))
        for m, lhs, rhs in al.nested_commutator_check(ham, [0, 1, 2], 4):
            assert lhs <= rhs * (1 + 1e-8), m
