import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renyimi import linalg as la
from renyimi.random_instances import SeededGenerator, random_density, random_unitary


def rand_herm(rng, d):
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (G + G.conj().T) / 2


def test_identity_spectrum():
    w, U = la.eig_hermitian(np.eye(4))
    assert np.allclose(w, 1)
    assert np.allclose(U.conj().T @ U, np.eye(4), atol=1e-10)


def test_pauli_z_spectrum():
    w, _ = la.eig_hermitian(np.diag([1.0, -1.0]))
    assert np.allclose(w, [-1, 1])


@pytest.mark.parametrize("d", [2, 5, 8])
def test_reconstruction(gen, d):
    M = rand_herm(gen.rng(), d)
    dec = la.eig_hermitian(M)
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    assert np.linalg.norm(dec.reconstruct() - M, 2) <= 1e-9 * (1 + np.linalg.norm(M, 2))
    U = dec.eigenvectors
    assert np.linalg.norm(U.conj().T @ U - np.eye(d)) < 1e-10


def test_non_hermitian_rejected():
    with pytest.raises(la.NotHermitianError):
        la.hermitian([[0, 1], [0, 0]])


def test_spectral_fn_identity_map(gen):
    M = rand_herm(gen.rng(), 6)
    assert np.allclose(la.spectral_fn(M, lambda x: x), M, atol=1e-10)


def test_pseudo_inverse_sqrt():
    out = la.spectral_fn(np.diag([4.0, 0.0]), lambda x: x**-0.5, support_only=True)
    assert np.allclose(out, np.diag([0.5, 0.0]))


def test_nonfinite_on_support_raises():
    with pytest.raises(la.SpectralError, match="eigenvalue"):
        la.spectral_fn(np.diag([1.0, 0.0]), lambda x: 1 / x, support_only=False)


def test_exp_of_diagonal_ising():
    # 2-site classical Ising: J Z Z + h (Z I + I Z), diagonal entries are scalar exponents
    J, h = 0.7, -0.3
    Z = np.diag([1.0, -1.0])
    H = J * np.kron(Z, Z) + h * (np.kron(Z, np.eye(2)) + np.kron(np.eye(2), Z))
    out = la.spectral_fn(-H, np.exp)
    expected = [np.exp(-(J * a * b + h * (a + b))) for a in (1, -1) for b in (1, -1)]
    assert np.allclose(np.diag(out), expected, rtol=1e-12)
    assert np.allclose(out - np.diag(np.diag(out)), 0)


@pytest.mark.parametrize("f", [np.exp, np.sqrt, lambda x: x**3], ids=["exp", "sqrt", "cube"])
def test_unitary_covariance(gen, f):
    rho = random_density(5, gen=gen.child(0))
    U = random_unitary(5, gen.child(1))
    lhs = la.spectral_fn(U @ rho.matrix @ U.conj().T, f)
    rhs = U @ la.spectral_fn(rho.matrix, f) @ U.conj().T
    assert np.linalg.norm(lhs - rhs, 2) < 1e-9


def _naive_partial_trace_3q(M, keep):
    # explicit index contraction for 3 qubits keeping factors {0, 2}
    assert keep == [0, 2]
    T = M.reshape([2] * 6)
    out = np.zeros((2, 2, 2, 2), dtype=complex)
    for a, c, a2, c2 in itertools.product(range(2), repeat=4):
        for b in range(2):
            out[a, c, a2, c2] += T[a, b, c, a2, b, c2]
    return out.reshape(4, 4)


def test_partial_trace_against_loops(gen):
    rho = random_density(8, gen=gen, dims=(2, 2, 2))
    red = la.partial_trace(rho, [0, 2])
    assert red.dims == (2, 2)
    assert np.allclose(red.matrix, _naive_partial_trace_3q(rho.matrix, [0, 2]), atol=1e-12)


def test_bell_marginal():
    bell = la.DensityOperator.from_vector(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))
    assert np.allclose(la.partial_trace(bell, [0]).matrix, np.eye(2) / 2, atol=1e-12)


@pytest.mark.parametrize("dA,dB", [(2, 2), (2, 4), (3, 2), (4, 2)])
def test_partial_trace_of_product(gen, dA, dB):
    a = random_density(dA, gen=gen.child(0))
    b = random_density(dB, gen=gen.child(1))
    ab = la.product_state(a, b)
    assert np.allclose(la.partial_trace(ab, [0]).matrix, a.matrix, atol=1e-12)
    assert np.allclose(la.partial_trace(ab, [1]).matrix, b.matrix, atol=1e-12)
    assert abs(np.trace(la.partial_trace(ab, [1]).matrix) - 1) < 1e-12


def test_empty_keep_rejected():
    with pytest.raises(ValueError, match="scalar trace"):
        la.partial_trace(la.DensityOperator.maximally_mixed((2, 2)), [])


def test_norms_simple():
    assert la.op_norm(np.array([[0, 1], [1, 0]])) == pytest.approx(1)
    assert la.trace_norm(np.diag([0.5, -0.5])) == pytest.approx(1)


def test_trace_distance_positive_part(gen):
    rho = random_density(2, gen=gen.child(0))
    sigma = random_density(2, gen=gen.child(1))
    w = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    # traceless difference: the trace norm is twice the positive part
    assert la.trace_norm(rho.matrix - sigma.matrix) == pytest.approx(2 * w[w > 0].sum(), abs=1e-12)


def test_kron_rejects_nonsquare():
    with pytest.raises(ValueError):
        la.kron(np.eye(2), np.ones((2, 3)))


def test_support_projector_sandwich(gen):
    rho = random_density(6, rank=3, gen=gen)
    P = la.support_projector(rho)
    assert np.linalg.norm(P @ rho.matrix @ P - rho.matrix, 2) < 1e-9
    assert rho.rank == 3 and not rho.full_support


def test_density_clips_tiny_negative():
    M = np.diag([1.0 + 1e-12, -1e-12])
    rho = la.DensityOperator(M)
    assert rho.eigenvalues.min() >= 0
    assert np.trace(rho.matrix).real == pytest.approx(1, abs=1e-14)


@pytest.mark.parametrize(
    "M,msg",
    [(np.diag([1.5, -0.5]), "negative"), (np.eye(2), "trace"), (np.eye(4) / 4, "dims")],
    ids=["negative", "trace", "dims"],
)
def test_density_rejects(M, msg):
    with pytest.raises(la.NotAStateError, match=msg):
        la.DensityOperator(M, (3,) if msg == "dims" else ())


def test_reorder_swaps_factors(gen):
    a = random_density(2, gen=gen.child(0))
    b = random_density(3, gen=gen.child(1))
    ab = la.product_state(a, b)
    assert np.allclose(ab.reorder([1, 0]).matrix, la.kron(b, a), atol=1e-12)


def test_embed_local_matches_kron():
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Z = np.diag([1.0, -1.0]).astype(complex)
    full = la.embed_local((2, 2, 2), np.kron(X, Z), [2, 0])
    assert np.allclose(full, la.kron(Z, np.eye(2), X))


def _herm_from(entries, d):
    a = np.array(entries[: d * d]).reshape(d, d)
    b = np.array(entries[d * d : 2 * d * d]).reshape(d, d)
    G = a + 1j * b
    return (G + G.conj().T) / 2


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(lambda d: st.tuples(st.just(d), st.lists(st.floats(-5, 5), min_size=2 * d * d, max_size=2 * d * d))))
def test_trace_norm_dominates_op_norm(args):
    d, entries = args
    M = _herm_from(entries, d)
    assert la.trace_norm(M) >= la.op_norm(M) - 1e-12 >= -1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (2, 3), (3, 2), (2, 2, 2)]))
def test_partial_traces_preserve_trace(seed, dims):
    rho = random_density(int(np.prod(dims)), gen=SeededGenerator(seed), dims=dims)
    for keep in range(len(dims)):
        red = la.partial_trace(rho, [keep])
        assert abs(np.trace(red.matrix).real - 1) < 1e-12
