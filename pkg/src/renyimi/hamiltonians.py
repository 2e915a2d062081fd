"""Local lattice Hamiltonians, bipartitions, thermal states and E_beta operators."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .linalg import DensityOperator, embed_local, hermitian, op_norm

MAX_DENSE_DIM = 4096
MAX_CLASSICAL_SITES = 20

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LocalTerm:
    """A Hermitian term acting on the sites ``support`` (in that tensor order)."""

    support: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        support = tuple(int(s) for s in self.support)
        if not support or len(set(support)) != len(support):
            raise ValueError(f"invalid term support {support}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "matrix", hermitian(self.matrix))

    @cached_property
    def norm(self) -> float:
        return op_norm(self.matrix)

    @property
    def is_diagonal(self) -> bool:
        M = self.matrix
        return bool(np.all(np.abs(M - np.diag(np.diag(M))) <= 1e-14 * max(1.0, np.abs(M).max())))


@dataclass(frozen=True, eq=False)
class LatticeHamiltonian:
    """A sum of local terms on sites with lattice coordinates.

    ``J`` (max over sites of the summed norms of the terms touching it),
    ``k`` (largest support size) and ``l`` (largest 1D extent) are recomputed
    from the term list.
    """

    coords: tuple[tuple[int, ...], ...]
    local_dim: int
    terms: tuple[LocalTerm, ...]
    periodic: bool = False
    name: str = ""

    def __post_init__(self):
        coords = tuple(tuple(int(c) for c in x) for x in self.coords)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "terms", tuple(self.terms))
        n, d = len(coords), int(self.local_dim)
        if d < 2:
            raise ValueError(f"local dimension must be >= 2, got {d}")
        for t in self.terms:
            if any(s < 0 or s >= n for s in t.support):
                raise IndexError(f"term support {t.support} out of range for {n} sites")
            if t.matrix.shape[0] != d ** len(t.support):
                raise ValueError(
                    f"term on {t.support} has dimension {t.matrix.shape[0]}, expected {d ** len(t.support)}"
                )

    @property
    def n_sites(self) -> int:
        return len(self.coords)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.local_dim,) * self.n_sites

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_sites

    @property
    def spatial_dim(self) -> int:
        return len(self.coords[0]) if self.coords else 0

    @cached_property
    def J(self) -> float:
        load = np.zeros(self.n_sites)
        for t in self.terms:
            load[list(t.support)] += t.norm
        return float(load.max()) if self.n_sites else 0.0

    @property
    def k(self) -> int:
        return max((len(t.support) for t in self.terms), default=0)

    @property
    def l(self) -> int:
        """Largest number of contiguous 1D sites spanned by a term (1D lattices only)."""
        if self.spatial_dim != 1:
            raise ValueError("the range l is only defined for 1D lattices")
        ext = 0
        for t in self.terms:
            xs = [self.coords[s][0] for s in t.support]
            ext = max(ext, max(xs) - min(xs) + 1)
        return ext

    @property
    def is_classical(self) -> bool:
        return all(t.is_diagonal for t in self.terms)

    def matrix(self) -> np.ndarray:
        return build_hamiltonian(self)


@dataclass(frozen=True)
class Bipartition:
    A: tuple[int, ...]
    B: tuple[int, ...]
    boundary_A: tuple[int, ...]
    boundary_B: tuple[int, ...]
    interaction_terms: tuple[int, ...]

    @property
    def interior_A(self) -> tuple[int, ...]:
        return tuple(x for x in self.A if x not in self.boundary_A)

    @property
    def interior_B(self) -> tuple[int, ...]:
        return tuple(x for x in self.B if x not in self.boundary_B)


def bipartition(ham: LatticeHamiltonian, A: Iterable[int]) -> Bipartition:
    """Split the sites into ``A`` and its complement and derive the boundaries."""
    A = tuple(sorted(set(int(a) for a in A)))
    n = ham.n_sites
    if not A or len(A) >= n or A[0] < 0 or A[-1] >= n:
        raise ValueError(f"A={A} must be a nonempty proper subset of the {n} sites")
    sA = set(A)
    B = tuple(x for x in range(n) if x not in sA)
    sB = set(B)
    crossing = []
    dA, dB = set(), set()
    for i, t in enumerate(ham.terms):
        supp = set(t.support)
        if supp & sA and supp & sB:
            crossing.append(i)
            dA |= supp & sA
            dB |= supp & sB
    return Bipartition(A, B, tuple(sorted(dA)), tuple(sorted(dB)), tuple(crossing))


def as_bipartition(ham: LatticeHamiltonian, cut) -> Bipartition:
    return cut if isinstance(cut, Bipartition) else bipartition(ham, cut)


def _embed(ham: LatticeHamiltonian, t: LocalTerm) -> np.ndarray:
    return embed_local(ham.dims, t.matrix, t.support)


def _check_dense(ham: LatticeHamiltonian):
    if ham.dim > MAX_DENSE_DIM:
        raise DimensionError(f"dense dimension {ham.dim} exceeds the limit {MAX_DENSE_DIM}")


def build_hamiltonian(ham: LatticeHamiltonian) -> np.ndarray:
    """Dense matrix of ``sum_i h_i`` (site 0 is the most significant tensor factor)."""
    _check_dense(ham)
    H = np.zeros((ham.dim, ham.dim), dtype=complex)
    for t in ham.terms:
        H += _embed(ham, t)
    return (H + H.conj().T) / 2


def split(ham: LatticeHamiltonian, cut) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense ``(H_A, H_B, H_I)``; terms touching both sides go into ``H_I``."""
    _check_dense(ham)
    part = as_bipartition(ham, cut)
    sA = set(part.A)
    out = [np.zeros((ham.dim, ham.dim), dtype=complex) for _ in range(3)]
    crossing = set(part.interaction_terms)
    for i, t in enumerate(ham.terms):
        slot = 2 if i in crossing else (0 if set(t.support) <= sA else 1)
        out[slot] += _embed(ham, t)
    return tuple((M + M.conj().T) / 2 for M in out)  # type: ignore[return-value]


def subsystem_hamiltonian(ham: LatticeHamiltonian, sites: Sequence[int]) -> LatticeHamiltonian:
    """Terms fully supported in ``sites``, relabelled onto that subsystem."""
    sites = sorted(set(sites))
    relabel = {s: i for i, s in enumerate(sites)}
    terms = [
        LocalTerm(tuple(relabel[s] for s in t.support), t.matrix)
        for t in ham.terms
        if set(t.support) <= set(sites)
    ]
    return LatticeHamiltonian(tuple(ham.coords[s] for s in sites), ham.local_dim, tuple(terms))


# ---------------------------------------------------------------- thermal states


def log_partition(H: np.ndarray, beta: float) -> float:
    w = np.linalg.eigvalsh(H)
    return float(logsumexp(-beta * w))


def gibbs(H: np.ndarray, beta: float, dims: Sequence[int] = ()) -> tuple[DensityOperator, float]:
    """Thermal state ``exp(-beta H)/Z`` and ``log Z`` via log-sum-exp over the spectrum."""
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta!r}")
    H = hermitian(H)
    w, U = np.linalg.eigh(H)
    logw = -beta * w
    logZ = float(logsumexp(logw))
    p = np.exp(logw - logZ)
    rho = (U * p) @ U.conj().T
    return DensityOperator(rho, tuple(dims)), logZ


def thermal_state(ham: LatticeHamiltonian, beta: float) -> tuple[DensityOperator, float]:
    return gibbs(build_hamiltonian(ham), beta, ham.dims)


def _exp_shifted(H: np.ndarray, s: float) -> tuple[np.ndarray, float]:
    """``exp(s H) = M * exp(shift)`` with ``||M|| = 1``; returns ``(M, shift)``."""
    w, U = np.linalg.eigh(H)
    x = s * w
    shift = float(x.max()) if x.size else 0.0
    return (U * np.exp(x - shift)) @ U.conj().T, shift


@dataclass(frozen=True)
class EBeta:
    """``E_beta = e^{-beta(H_A+H_B)} e^{beta H}`` and its inverse, with norms."""

    E: np.ndarray
    E_inv: np.ndarray
    log_norm: float
    log_norm_inv: float

    @property
    def norm(self) -> float:
        return float(np.exp(self.log_norm))

    @property
    def norm_inv(self) -> float:
        return float(np.exp(self.log_norm_inv))


def e_beta(ham: LatticeHamiltonian, cut, beta: float) -> EBeta:
    """Compute ``E_beta`` and ``E_beta^{-1} = e^{-beta H} e^{beta(H_A+H_B)}``.

    Exponentials are formed with spectral shifts so that only the logarithms
    of the norms can become large; ``E`` itself is returned unshifted.
    """
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta!r}")
    HA, HB, HI = split(ham, cut)
    H0 = HA + HB
    H = H0 + HI
    a, sa = _exp_shifted(H0, -beta)
    b, sb = _exp_shifted(H, beta)
    c, sc = _exp_shifted(H, -beta)
    d, sd = _exp_shifted(H0, beta)
    P, Q = a @ b, c @ d
    log_norm = float(np.log(np.linalg.norm(P, 2)) + sa + sb)
    log_norm_inv = float(np.log(np.linalg.norm(Q, 2)) + sc + sd)
    with np.errstate(over="ignore"):
        E = P * np.exp(sa + sb)
        E_inv = Q * np.exp(sc + sd)
    return EBeta(E, E_inv, log_norm, log_norm_inv)


# ---------------------------------------------------------------- classical models


def _config_digits(n: int, d: int) -> np.ndarray:
    """``digits[s, x]`` = state of site ``s`` in configuration ``x`` (site 0 most significant)."""
    idx = np.arange(d**n)
    powers = d ** np.arange(n - 1, -1, -1)
    return (idx[None, :] // powers[:, None]) % d


def classical_energies(ham: LatticeHamiltonian) -> np.ndarray:
    """Diagonal of the Hamiltonian by enumeration of configurations."""
    if not ham.is_classical:
        raise ValueError("classical enumeration needs every term diagonal in the computational basis")
    n, d = ham.n_sites, ham.local_dim
    if n > MAX_CLASSICAL_SITES:
        raise DimensionError(f"{n} sites exceed the enumeration limit {MAX_CLASSICAL_SITES}")
    digits = _config_digits(n, d)
    E = np.zeros(d**n)
    for t in ham.terms:
        diag = np.diag(t.matrix).real
        local = np.zeros(d**n, dtype=np.int64)
        for s in t.support:
            local = local * d + digits[s]
        E += diag[local]
    return E


def classical_gibbs(ham: LatticeHamiltonian, beta: float) -> np.ndarray:
    """Boltzmann distribution over configurations, ordered like the dense basis."""
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta!r}")
    logw = -beta * classical_energies(ham)
    return np.exp(logw - logsumexp(logw))


def marginal(p: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Marginal of a distribution over product configurations (kept sites ascending)."""
    dims = list(dims)
    keep = sorted(set(keep))
    T = np.asarray(p).reshape(dims)
    drop = tuple(i for i in range(len(dims)) if i not in keep)
    return T.sum(axis=drop).ravel() if drop else T.ravel()


# ---------------------------------------------------------------- presets


def _chain_coords(n: int) -> tuple[tuple[int], ...]:
    return tuple((i,) for i in range(n))


def _bonds(n: int, periodic: bool) -> list[tuple[int, int]]:
    bonds = [(i, i + 1) for i in range(n - 1)]
    if periodic and n > 2:
        bonds.append((n - 1, 0))
    return bonds


def classical_ising_chain(n: int, J: float, h: float, periodic: bool = False) -> LatticeHamiltonian:
    """``sum_i h Z_i + J Z_i Z_{i+1}`` (J > 0 antiferromagnetic)."""
    terms = [LocalTerm(b, J * np.kron(PAULI_Z, PAULI_Z)) for b in _bonds(n, periodic)]
    if h:
        terms += [LocalTerm((i,), h * PAULI_Z) for i in range(n)]
    return LatticeHamiltonian(_chain_coords(n), 2, tuple(terms), periodic, "classical_ising")


def transverse_ising_chain(n: int, J: float, h: float, periodic: bool = False) -> LatticeHamiltonian:
    """``sum_i J Z_i Z_{i+1} + h X_i``."""
    terms = [LocalTerm(b, J * np.kron(PAULI_Z, PAULI_Z)) for b in _bonds(n, periodic)]
    if h:
        terms += [LocalTerm((i,), h * PAULI_X) for i in range(n)]
    return LatticeHamiltonian(_chain_coords(n), 2, tuple(terms), periodic, "transverse_ising")


def heisenberg_chain(n: int, J: float, h: float = 0.0, periodic: bool = False) -> LatticeHamiltonian:
    """``sum_i J (XX + YY + ZZ) + h Z_i``."""
    bond = J * sum(np.kron(P, P) for P in (PAULI_X, PAULI_Y, PAULI_Z))
    terms = [LocalTerm(b, bond) for b in _bonds(n, periodic)]
    if h:
        terms += [LocalTerm((i,), h * PAULI_Z) for i in range(n)]
    return LatticeHamiltonian(_chain_coords(n), 2, tuple(terms), periodic, "heisenberg")


def grid_ising(rows: int, cols: int, J: float, h: float, transverse: bool = True) -> LatticeHamiltonian:
    """Open 2D grid with nearest-neighbour ``J ZZ`` and a field ``h X`` (or ``h Z``)."""
    coords = tuple((r, c) for r in range(rows) for c in range(cols))
    index = {x: i for i, x in enumerate(coords)}
    terms = []
    for (r, c), i in index.items():
        for nb in ((r + 1, c), (r, c + 1)):
            if nb in index:
                terms.append(LocalTerm((i, index[nb]), J * np.kron(PAULI_Z, PAULI_Z)))
    field_op = PAULI_X if transverse else PAULI_Z
    if h:
        terms += [LocalTerm((i,), h * field_op) for i in range(len(coords))]
    return LatticeHamiltonian(coords, 2, tuple(terms), False, "grid_ising")


PRESETS = {
    "classical_ising": classical_ising_chain,
    "transverse_ising": transverse_ising_chain,
    "heisenberg": heisenberg_chain,
}
