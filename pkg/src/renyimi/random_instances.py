"""Reproducible random states, channels, observables and Hamiltonians.

Draws come from numpy's counter-based Philox generator keyed by
``(seed, stream)``, so a given pair reproduces bit-identical draws
regardless of the order in which other streams are consumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import prod
from typing import Sequence

import numpy as np

from .hamiltonians import LatticeHamiltonian, LocalTerm, classical_ising_chain
from .linalg import DensityOperator

ALGORITHM = "philox-4x64/seedsequence-v1"


@dataclass(frozen=True)
class SeededGenerator:
    seed: int = 0
    stream: tuple[int, ...] = ()

    def rng(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed) & (2**64 - 1), spawn_key=tuple(self.stream))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, *index: int) -> "SeededGenerator":
        return SeededGenerator(self.seed, tuple(self.stream) + tuple(int(i) for i in index))


def _rng(gen) -> np.random.Generator:
    if isinstance(gen, SeededGenerator):
        return gen.rng()
    if isinstance(gen, np.random.Generator):
        return gen
    return SeededGenerator(int(gen or 0)).rng()


def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(d: int, rank: int | None = None, gen=None, dims: Sequence[int] = ()) -> DensityOperator:
    """Hilbert-Schmidt-type state ``G G^dagger / Tr`` with ``G`` a ``d x rank`` Ginibre matrix."""
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise ValueError(f"rank must be in [1, {d}], got {rank}")
    G = ginibre(_rng(gen), d, rank)
    M = G @ G.conj().T
    return DensityOperator(M / np.trace(M).real, tuple(dims))


def random_unitary(d: int, gen=None) -> np.ndarray:
    Q, R = np.linalg.qr(ginibre(_rng(gen), d, d))
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph[None, :]


def random_cptp(d_in: int, d_out: int, kraus_count: int, gen=None) -> list[np.ndarray]:
    """Kraus operators of a random channel from a Ginibre isometry ``C^{d_in} -> C^{kraus_count d_out}``."""
    if kraus_count < 1:
        raise ValueError("kraus_count must be >= 1")
    if kraus_count * d_out < d_in:
        raise ValueError(f"{kraus_count} Kraus operators of size {d_out}x{d_in} cannot be trace preserving")
    Q, R = np.linalg.qr(ginibre(_rng(gen), kraus_count * d_out, d_in))
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))[None, :]
    return [Q[i * d_out : (i + 1) * d_out, :] for i in range(kraus_count)]


def partial_trace_kraus(dims: Sequence[int], keep: Sequence[int]) -> list[np.ndarray]:
    """Kraus operators ``K_j`` of the partial trace over the factors not in ``keep``."""
    dims = list(dims)
    n = len(dims)
    keep = sorted(set(keep))
    traced = [i for i in range(n) if i not in keep]
    D = prod(dims)
    dk = prod(dims[i] for i in keep)
    dt = prod(dims[i] for i in traced)
    digits = np.array(np.unravel_index(np.arange(D), dims))
    k_idx = np.ravel_multi_index(digits[keep], [dims[i] for i in keep]) if keep else np.zeros(D, int)
    t_idx = np.ravel_multi_index(digits[traced], [dims[i] for i in traced]) if traced else np.zeros(D, int)
    out = []
    for j in range(dt):
        K = np.zeros((dk, D), dtype=complex)
        cols = np.nonzero(t_idx == j)[0]
        K[k_idx[cols], cols] = 1
        out.append(K)
    return out


def random_pure(d_A: int, d_B: int, schmidt_rank: int | None = None, gen=None) -> np.ndarray:
    """``sum_i sqrt(l_i) |e_i>|f_i>`` with exactly ``schmidt_rank`` nonzero coefficients."""
    r = min(d_A, d_B) if schmidt_rank is None else int(schmidt_rank)
    if not 1 <= r <= min(d_A, d_B):
        raise ValueError(f"Schmidt rank must be in [1, {min(d_A, d_B)}], got {r}")
    rng = _rng(gen)
    UA = random_unitary(d_A, rng)[:, :r]
    UB = random_unitary(d_B, rng)[:, :r]
    lam = rng.dirichlet(np.ones(r))
    psi = np.einsum("i,ai,bi->ab", np.sqrt(lam), UA, UB).ravel()
    return psi / np.linalg.norm(psi)


def random_observable(d: int, gen=None) -> np.ndarray:
    G = ginibre(_rng(gen), d, d)
    return (G + G.conj().T) / 2


def random_local_hamiltonian(
    n_sites: int, d: int = 2, k: int = 2, gen=None, scale: float = 1.0, periodic: bool = False
) -> LatticeHamiltonian:
    """Random 1D chain with a term on every window of ``k`` consecutive sites plus single-site fields."""
    rng = _rng(gen)
    terms = []
    windows = [tuple(range(i, i + k)) for i in range(n_sites - k + 1)]
    if periodic and n_sites > k:
        windows += [tuple((i + j) % n_sites for j in range(k)) for i in range(n_sites - k + 1, n_sites)]
    for w in windows:
        terms.append(LocalTerm(w, scale * random_observable(d**k, rng)))
    for i in range(n_sites):
        terms.append(LocalTerm((i,), scale * random_observable(d, rng)))
    return LatticeHamiltonian(tuple((i,) for i in range(n_sites)), d, tuple(terms), periodic, "random_local")


def random_commuting_chain(
    n_sites: int, gen=None, scale: float = 1.0, periodic: bool = False, d: int = 2
) -> LatticeHamiltonian:
    """Random diagonal nearest-neighbour chain (all terms commute)."""
    rng = _rng(gen)
    bonds = [(i, i + 1) for i in range(n_sites - 1)]
    if periodic and n_sites > 2:
        bonds.append((n_sites - 1, 0))
    terms = [LocalTerm(b, scale * np.diag(rng.standard_normal(d * d))) for b in bonds]
    terms += [LocalTerm((i,), scale * np.diag(rng.standard_normal(d))) for i in range(n_sites)]
    return LatticeHamiltonian(tuple((i,) for i in range(n_sites)), d, tuple(terms), periodic, "random_commuting")


def random_classical_ising(n_sites: int, gen=None, periodic: bool = True, J_range=(-1.5, 1.5), h_range=(-1.0, 1.0)):
    """Classical Ising chain or ring with random uniform ``J`` and ``h``."""
    rng = _rng(gen)
    return classical_ising_chain(n_sites, float(rng.uniform(*J_range)), float(rng.uniform(*h_range)), periodic)


def random_grid_hamiltonian(rows: int, cols: int, gen=None, scale: float = 1.0) -> LatticeHamiltonian:
    """Random two-body terms on the nearest-neighbour bonds of an open grid."""
    rng = _rng(gen)
    coords = tuple((r, c) for r in range(rows) for c in range(cols))
    index = {x: i for i, x in enumerate(coords)}
    terms = []
    for a, b in combinations(coords, 2):
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1:
            terms.append(LocalTerm((index[a], index[b]), scale * random_observable(4, rng)))
    return LatticeHamiltonian(coords, 2, tuple(terms), False, "random_grid")
