"""Connected correlators, the Pinsker-type lower bound and the correlation bound."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import divergences as dv
from .linalg import DensityOperator, hermitian, kron, op_norm, trace_norm

PHI_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ObservablePair:
    M_A: np.ndarray
    M_B: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "M_A", hermitian(self.M_A))
        object.__setattr__(self, "M_B", hermitian(self.M_B))
        for name in ("M_A", "M_B"):
            if op_norm(getattr(self, name)) == 0:
                raise ValueError(f"{name} is the zero observable")

    @property
    def norm_A(self) -> float:
        return op_norm(self.M_A)

    @property
    def norm_B(self) -> float:
        return op_norm(self.M_B)


def _ordered(rho: DensityOperator, cut: Sequence[int] | None):
    if cut is None:
        if len(rho.dims) != 2:
            raise ValueError("state must have exactly two factors A, B when no cut is given")
        cut = [0]
    joint, prod_state, rho_A, rho_B = dv.split_marginals(rho, cut)
    return joint, prod_state, rho_A, rho_B


def corr_fn(rho: DensityOperator, pair: ObservablePair, cut: Sequence[int] | None = None) -> float:
    """Connected correlator ``<M_A M_B> - <M_A><M_B>`` (A = factors in ``cut``)."""
    joint, _, rho_A, rho_B = _ordered(rho, cut)
    if pair.M_A.shape[0] != rho_A.dim or pair.M_B.shape[0] != rho_B.dim:
        raise ValueError(
            f"observable dimensions {pair.M_A.shape[0]}, {pair.M_B.shape[0]} "
            f"do not match subsystems {rho_A.dim}, {rho_B.dim}"
        )
    ab = np.trace(joint.matrix @ kron(pair.M_A, pair.M_B)).real
    a = np.trace(rho_A.matrix @ pair.M_A).real
    b = np.trace(rho_B.matrix @ pair.M_B).real
    return float(ab - a * b)


def positive_part_projector(X: np.ndarray, tol: float = PHI_TOL) -> np.ndarray:
    """Projector onto eigenvectors of ``X`` with eigenvalue ``>= -tol``."""
    w, U = np.linalg.eigh(hermitian(X))
    V = U[:, w >= -tol]
    return V @ V.conj().T


def binary_distributions(rho, sigma) -> tuple[np.ndarray, np.ndarray]:
    """Outcome distributions of the two-outcome test ``{phi+, I - phi+}`` of ``rho - sigma``."""
    R, S = np.asarray(rho), np.asarray(sigma)
    phi = positive_part_projector(R - S)
    p = np.trace(R @ phi).real
    q = np.trace(S @ phi).real
    P = np.clip(np.array([p, 1 - p]), 0, 1)
    Q = np.clip(np.array([q, 1 - q]), 0, 1)
    return P / P.sum(), Q / Q.sum()


def binary_pinsker_check(rho, sigma, alpha: float) -> tuple[float, float]:
    """``(D_alpha(P || Q), min(1, alpha) ||rho - sigma||_1^2 / 2)`` for the binary test."""
    if alpha <= 0 or alpha == 1:
        raise dv.AlphaRangeError(f"alpha must be in (0,1)u(1,inf), got {alpha!r}")
    P, Q = binary_distributions(rho, sigma)
    lhs = dv.classical_renyi(P, Q, alpha)
    t = trace_norm(np.asarray(rho) - np.asarray(sigma))
    return float(lhs), float(min(1.0, alpha) * t * t / 2)


def pinsker_check(rho, sigma, alpha: float, opts=None) -> tuple[float, float]:
    """``(D^M_alpha(rho || sigma), ||rho - sigma||_1^2 / 2)`` for ``alpha > 1``."""
    alpha = dv.check_alpha("measured", alpha)
    lhs = dv.measured(rho, sigma, alpha, opts).value
    t = trace_norm(np.asarray(rho) - np.asarray(sigma))
    return float(lhs), float(t * t / 2)


def correlation_bound_rhs(C: float, pair: ObservablePair, alpha: float) -> float:
    """``min(1, alpha) C^2 / (2 ||M_A||^2 ||M_B||^2)``."""
    return float(min(1.0, alpha) * C * C / (2 * pair.norm_A**2 * pair.norm_B**2))


def correlation_bound_check(
    rho: DensityOperator, cut: Sequence[int] | None, pair: ObservablePair, alpha: float, opts=None
) -> tuple[float, float]:
    """``(I^M_alpha(A:B), min(1, alpha) C^2 / (2 ||M_A||^2 ||M_B||^2))``.

    For ``alpha > 1`` the measured MI is computed directly; for ``alpha < 1``
    the left side is the binary-test divergence between ``rho_AB`` and
    ``rho_A x rho_B``, which lower-bounds the measured MI and already
    satisfies the inequality.
    """
    C = corr_fn(rho, pair, cut)
    rhs = correlation_bound_rhs(C, pair, alpha)
    joint, prod_state, _, _ = _ordered(rho, cut)
    if alpha > 1:
        mi = dv.measured(joint, prod_state, alpha, opts).value
    elif 0 < alpha < 1:
        P, Q = binary_distributions(joint, prod_state)
        mi = dv.classical_renyi(P, Q, alpha)
    else:
        raise dv.AlphaRangeError(f"alpha must be in (0,1)u(1,inf), got {alpha!r}")
    return float(mi), rhs
