"""Schmidt decompositions and the pure-state divergence identities.

For ``|psi>`` with reduced state ``rho_A`` the sandwiched divergence to the
product of marginals equals ``2 S_{2/alpha - 1}(rho_A)`` and the Petz one
``2 S_{3 - 2 alpha}(rho_A)``. Together with monotonicity under local channels
this bounds the measured MI of any state with a bounded-rank purification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import divergences as dv
from .area_laws import Bound, Certificate
from .linalg import DensityOperator, apply_kraus, partial_trace

SCHMIDT_TOL = 1e-12


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray  # sqrt(lambda_i), nonincreasing
    basis_A: np.ndarray  # columns e_i
    basis_B: np.ndarray  # columns f_i

    @property
    def probabilities(self) -> np.ndarray:
        return self.coefficients**2

    @property
    def rank(self) -> int:
        return int(np.sum(self.probabilities > SCHMIDT_TOL))

    def reconstruct(self) -> np.ndarray:
        return np.einsum("i,ai,bi->ab", self.coefficients, self.basis_A, self.basis_B).ravel()


def _normalized(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1) > 1e-10:
        raise ValueError(f"state vector has norm {nrm!r}, expected 1")
    return psi


def schmidt(psi, dims: tuple[int, int]) -> SchmidtData:
    """Schmidt decomposition from the SVD of the ``d_A x d_B`` coefficient matrix."""
    psi = _normalized(psi)
    dA, dB = dims
    if dA * dB != psi.size:
        raise ValueError(f"dims {dims} do not match vector length {psi.size}")
    U, s, Vh = np.linalg.svd(psi.reshape(dA, dB), full_matrices=False)
    return SchmidtData(s, U, Vh.T)


def _pure_pair(psi, dims):
    psi = _normalized(psi)
    rho = DensityOperator.from_vector(psi, tuple(dims))
    rho_A = partial_trace(rho, [0])
    return rho, rho_A


def verify_sandwiched_identity(psi, dims: tuple[int, int], alpha: float) -> tuple[float, float]:
    """``(D~_alpha(psi || rho_A x rho_B), 2 S_{2/alpha-1}(rho_A))`` for ``alpha in (0,1) u (1,2)``.

    Below ``alpha = 1/2`` the sandwiched expression is evaluated outside its
    usual range, using the same pseudo-inverse convention.
    """
    if not (0 < alpha < 1 or 1 < alpha < 2):
        raise dv.AlphaRangeError(f"identity stated for alpha in (0,1)u(1,2), got {alpha!r}")
    rho, rho_A = _pure_pair(psi, dims)
    prod_state = dv.split_marginals(rho, [0])[1]
    lhs = dv._sandwiched_value(rho, prod_state, alpha).value
    rhs = 2 * dv.renyi_entropy(rho_A, 2 / alpha - 1)
    return float(lhs), float(rhs)


def verify_petz_identity(psi, dims: tuple[int, int], alpha: float) -> tuple[float, float]:
    """``(D_alpha(psi || rho_A x rho_B), 2 S_{3-2alpha}(rho_A))`` for ``alpha in (0,1) u (1,3/2)``."""
    if not (0 < alpha < 1 or 1 < alpha < 1.5):
        raise dv.AlphaRangeError(f"identity stated for alpha in (0,1)u(1,3/2), got {alpha!r}")
    rho, rho_A = _pure_pair(psi, dims)
    prod_state = dv.split_marginals(rho, [0])[1]
    lhs = dv.petz(rho, prod_state, alpha).value
    rhs = 2 * dv.renyi_entropy(rho_A, 3 - 2 * alpha)
    return float(lhs), float(rhs)


def theorem5_check(
    psi,
    dims: Sequence[int],
    schmidt_rank_bound: int,
    alpha: float,
    channels: tuple | None = None,
    opts=None,
) -> Certificate:
    """Measured MI after discarding ancillas against ``2 log(rank bound)``.

    ``dims = (d_A, d_a, d_B, d_b)`` lists the factors of the purification in
    that order: system A, its ancilla, system B, its ancilla. The cut is
    ``(A a) | (B b)``. Optional ``channels = (kraus_A, kraus_B)`` are applied
    locally to the reduced state afterwards.

    For ``alpha > 1`` the measured MI is computed directly. For ``alpha < 1``
    the Petz MI is reported instead: it dominates the measured MI in this
    range (data processing under the measurement channel), so the bound is
    checked on an upper estimate. For ``alpha > 2`` the bound is marked
    inapplicable.
    """
    dA, da, dB, db = (int(x) for x in dims)
    psi = _normalized(psi)
    rank = schmidt(psi, (dA * da, dB * db)).rank
    if rank > schmidt_rank_bound:
        raise PreconditionError(f"Schmidt rank {rank} across the cut exceeds the declared bound {schmidt_rank_bound}")
    full = DensityOperator.from_vector(psi, (dA, da, dB, db))
    rho = partial_trace(full, [0, 2])
    if channels is not None:
        KA, KB = channels
        kraus = [np.kron(a, b) for a in KA for b in KB]
        dA_out, dB_out = KA[0].shape[0], KB[0].shape[0]
        rho = apply_kraus(kraus, rho, (dA_out, dB_out))
    if alpha > 1:
        mi = dv.mutual_information(rho, [0], "measured", alpha, opts)
    elif 0 < alpha < 1:
        mi = dv.mutual_information(rho, [0], "petz", alpha)
    else:
        raise dv.AlphaRangeError(f"alpha must be in (0,1)u(1,inf), got {alpha!r}")
    ok = alpha <= 2
    b = Bound("thm5_purification", 2 * math.log(schmidt_rank_bound), ok, note="" if ok else "alpha > 2")
    return Certificate(mi, "measured" if alpha > 1 else "petz", alpha, math.nan, [b])


def epsilon_state(eps: float) -> np.ndarray:
    """``sqrt(eps)|00> + sqrt(1-eps)|11>``."""
    psi = np.zeros(4, dtype=complex)
    psi[0], psi[3] = math.sqrt(eps), math.sqrt(1 - eps)
    return psi


def epsilon_measured_lower_bound(eps: float, alpha: float = 3.0) -> float:
    """Computational-basis measured MI of :func:`epsilon_state` (a lower bound on the measured MI)."""
    rho = DensityOperator.from_vector(epsilon_state(eps), (2, 2))
    _, prod_state, _, _ = dv.split_marginals(rho, [0])
    return dv.measured_in_basis(rho, prod_state, np.eye(4), alpha)
