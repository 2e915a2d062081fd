"""Dense Hermitian spectral engine.

Everything downstream (divergences, thermal states, area-law bounds) goes
through full eigendecompositions of matrices of dimension at most a few
thousand. Pseudo-inverses and fractional powers are taken on the support
of the operator, i.e. on eigenvalues above ``support_tol * max|eig|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import prod
from typing import Callable, NamedTuple, Sequence

import numpy as np

HERM_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
SUPPORT_TOL = 1e-12


class NotHermitianError(ValueError):
    pass


class NotAStateError(ValueError):
    pass


class SpectralError(ArithmeticError):
    pass


def hermitian(M, herm_tol: float = HERM_TOL) -> np.ndarray:
    """Validate ``M`` as Hermitian and return its symmetrized copy."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {M.shape}")
    skew = M - M.conj().T
    # Frobenius dominates the operator norm, so the exact check is only needed on failure
    if np.linalg.norm(skew) > herm_tol:
        dev = np.linalg.norm(skew, 2)
        scale = max(np.linalg.norm(M, 2), 1.0)
    else:
        dev, scale = 0.0, 1.0
    if dev / scale > herm_tol:
        raise NotHermitianError(
            f"matrix deviates from Hermitian by {dev / scale:.3e} (tolerance {herm_tol:.1e})"
        )
    return (M + M.conj().T) / 2


def _as_matrix(M) -> np.ndarray:
    if isinstance(M, DensityOperator):
        return M.matrix
    return np.asarray(M)


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


def eig_hermitian(M) -> SpectralDecomposition:
    """Eigendecomposition with ascending eigenvalues and unitary eigenvectors."""
    M = _as_matrix(M)
    try:
        w, U = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(
            f"eigensolver failed for dim={M.shape[0]}, ||M||_F={np.linalg.norm(M):.3e}: {exc}"
        ) from exc
    if not np.all(np.isfinite(w)):
        raise SpectralError(
            f"non-finite eigenvalues for dim={M.shape[0]}, ||M||_F={np.linalg.norm(M):.3e}"
        )
    return SpectralDecomposition(w, U)


def support_mask(eigenvalues: np.ndarray, support_tol: float = SUPPORT_TOL) -> np.ndarray:
    """Eigenvalues counted as belonging to the support (relative cutoff)."""
    top = np.max(np.abs(eigenvalues)) if eigenvalues.size else 0.0
    return eigenvalues > support_tol * top


def spectral_fn(
    M,
    f: Callable[[np.ndarray], np.ndarray],
    support_only: bool = False,
    support_tol: float = SUPPORT_TOL,
    decomposition: SpectralDecomposition | None = None,
) -> np.ndarray:
    """Apply the scalar function ``f`` to the spectrum of a Hermitian matrix.

    With ``support_only`` the function is evaluated only on eigenvalues above
    the relative support cutoff; the kernel is mapped to zero, which is the
    pseudo-inverse convention for negative powers.
    """
    w, U = decomposition if decomposition is not None else eig_hermitian(M)
    fw = np.zeros_like(w)
    mask = support_mask(w, support_tol) if support_only else np.ones(w.shape, bool)
    with np.errstate(all="ignore"):
        fw[mask] = f(w[mask])
    bad = mask & ~np.isfinite(fw)
    if np.any(bad):
        raise SpectralError(f"function is not finite at eigenvalue {w[bad][0]!r}")
    return (U * fw) @ U.conj().T


def power(M, p: float, support_only: bool = True) -> np.ndarray:
    """Fractional power on the support (``M`` positive semidefinite)."""
    return spectral_fn(M, lambda x: x**p, support_only=support_only)


def kron(*ops) -> np.ndarray:
    mats = [_as_matrix(op) for op in ops]
    for m in mats:
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"kron expects square matrices, got shape {m.shape}")
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def op_norm(M) -> float:
    """Largest singular value (largest |eigenvalue| for Hermitian input)."""
    M = _as_matrix(M)
    if M.size == 0:
        return 0.0
    if np.allclose(M, M.conj().T, rtol=0, atol=1e-13 * max(1.0, np.abs(M).max())):
        return float(np.max(np.abs(np.linalg.eigvalsh((M + M.conj().T) / 2))))
    return float(np.linalg.norm(M, 2))


def trace_norm(M) -> float:
    """Sum of singular values (sum of |eigenvalues| for Hermitian input)."""
    M = _as_matrix(M)
    if M.size == 0:
        return 0.0
    if np.allclose(M, M.conj().T, rtol=0, atol=1e-13 * max(1.0, np.abs(M).max())):
        return float(np.sum(np.abs(np.linalg.eigvalsh((M + M.conj().T) / 2))))
    return float(np.sum(np.linalg.svd(M, compute_uv=False)))


def support_projector(rho, support_tol: float = SUPPORT_TOL) -> np.ndarray:
    w, U = eig_hermitian(_as_matrix(rho))
    V = U[:, support_mask(w, support_tol)]
    return V @ V.conj().T


def permute_factors(M, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of an operator: new factor ``i`` is old ``order[i]``."""
    M = _as_matrix(M)
    dims = list(dims)
    n = len(dims)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {list(order)} is not a permutation of {n} factors")
    T = M.reshape(dims + dims)
    T = T.transpose(list(order) + [n + i for i in order])
    D = prod(dims)
    return T.reshape(D, D)


def partial_trace_matrix(M, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a plain operator, keeping ``keep`` (returned in ascending order)."""
    M = _as_matrix(M)
    dims = list(dims)
    n = len(dims)
    keep = sorted(set(keep))
    if any(i < 0 or i >= n for i in keep):
        raise IndexError(f"keep={keep} out of range for {n} factors")
    traced = [i for i in range(n) if i not in keep]
    T = M.reshape(dims + dims)
    # bring kept factors to the front, traced ones to the back, pairwise
    T = T.transpose(keep + traced + [n + i for i in keep] + [n + i for i in traced])
    dk = prod(dims[i] for i in keep)
    dt = prod(dims[i] for i in traced)
    T = T.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", T)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive semidefinite, unit-trace Hermitian matrix with tensor-factor dims.

    Small negative eigenvalues (above ``-psd_tol * lambda_max``) are clipped
    and the matrix renormalized; larger ones are rejected.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = field(default=())
    psd_tol: float = PSD_TOL

    def __post_init__(self):
        M = hermitian(self.matrix)
        dims = tuple(int(d) for d in self.dims) if self.dims else (M.shape[0],)
        if any(d < 1 for d in dims) or prod(dims) != M.shape[0]:
            raise NotAStateError(f"dims {dims} do not multiply to dimension {M.shape[0]}")
        tr = np.trace(M).real
        if abs(tr - 1) > TRACE_TOL:
            raise NotAStateError(f"trace is {tr!r}, expected 1")
        w, U = np.linalg.eigh(M)
        lmax = max(w[-1], 0.0)
        if w[0] < -self.psd_tol * max(lmax, 1e-300):
            raise NotAStateError(f"negative eigenvalue {w[0]:.3e} (lambda_max {lmax:.3e})")
        if w[0] < 0:
            w = np.clip(w, 0.0, None)
            w = w / w.sum()
            M = (U * w) @ U.conj().T
            M = (M + M.conj().T) / 2
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "_spectrum", SpectralDecomposition(w, U))

    @classmethod
    def from_unnormalized(cls, M, dims: Sequence[int] = ()) -> "DensityOperator":
        M = hermitian(M)
        return cls(M / np.trace(M).real, tuple(dims))

    @classmethod
    def from_vector(cls, psi, dims: Sequence[int] = ()) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex).ravel()
        nrm = np.linalg.norm(psi)
        if abs(nrm - 1) > 1e-10:
            raise NotAStateError(f"state vector has norm {nrm!r}")
        return cls(np.outer(psi, psi.conj()), tuple(dims))

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "DensityOperator":
        D = prod(dims)
        return cls(np.eye(D, dtype=complex) / D, tuple(dims))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def spectrum(self) -> SpectralDecomposition:
        return self._spectrum  # type: ignore[attr-defined]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._spectrum.eigenvalues  # type: ignore[attr-defined]

    @cached_property
    def support(self) -> np.ndarray:
        w, U = self.spectrum
        return U[:, support_mask(w)]

    @property
    def rank(self) -> int:
        return int(self.support.shape[1])

    @property
    def full_support(self) -> bool:
        return self.rank == self.dim

    def reorder(self, order: Sequence[int]) -> "DensityOperator":
        M = permute_factors(self.matrix, self.dims, order)
        return DensityOperator(M, tuple(self.dims[i] for i in order))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def partial_trace(rho: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    """Reduced state on the factors ``keep`` (kept in ascending order)."""
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("empty keep set: the partial trace over everything is the scalar trace")
    M = partial_trace_matrix(rho.matrix, rho.dims, keep)
    return DensityOperator(M, tuple(rho.dims[i] for i in keep))


def product_state(*states: DensityOperator) -> DensityOperator:
    dims = tuple(d for s in states for d in s.dims)
    return DensityOperator(kron(*states), dims)


def apply_kraus(kraus: Sequence[np.ndarray], rho, dims_out: Sequence[int] = ()) -> DensityOperator:
    """Apply the channel ``rho -> sum_i K_i rho K_i^dagger``."""
    M = _as_matrix(rho)
    out = sum(K @ M @ K.conj().T for K in kraus)
    return DensityOperator(out, tuple(dims_out))


def embed_local(dims: Sequence[int], op: np.ndarray, sites: Sequence[int]) -> np.ndarray:
    """Embed an operator acting on ``sites`` (in that order) into the full space."""
    dims = list(dims)
    n = len(dims)
    sites = list(sites)
    if len(set(sites)) != len(sites) or any(s < 0 or s >= n for s in sites):
        raise IndexError(f"invalid support {sites} for {n} factors")
    rest = [i for i in range(n) if i not in sites]
    op = np.asarray(op)
    d_rest = prod(dims[i] for i in rest)
    full = np.kron(op, np.eye(d_rest))
    layout = sites + rest  # factor order of ``full``
    inverse = [layout.index(i) for i in range(n)]
    return permute_factors(full, [dims[i] for i in layout], inverse)
