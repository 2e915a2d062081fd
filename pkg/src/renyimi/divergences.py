"""Quantum Rényi divergences and the mutual informations built from them.

All divergences are natural-log valued. Pseudo-inverses live on the support
of ``sigma`` (relative eigenvalue cutoff ``SUPPORT_TOL``); traces of large
powers are accumulated in log space so that ``alpha`` up to ~1e8 is safe.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.optimize import minimize

from .linalg import (
    SUPPORT_TOL,
    DensityOperator,
    kron,
    partial_trace,
    support_mask,
)

SUPPORT_LEAK_TOL = 1e-10
FAMILIES = ("umegaki", "petz", "sandwiched", "geometric", "maximal", "measured")
MI_VARIANTS = ("entropy_alpha",) + FAMILIES


class AlphaRangeError(ValueError):
    pass


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    support_ok: bool = True
    iterations: int = 0
    gap_estimate: float = 0.0
    converged: bool = True
    family: str = ""
    alpha: float | None = None

    def __float__(self) -> float:
        return float(self.value)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


def _in_range(family: str, alpha: float) -> bool:
    if family == "petz":
        return 0 < alpha < 1 or 1 < alpha <= 2
    if family == "sandwiched":
        return 0.5 <= alpha < 1 or alpha > 1
    if family == "geometric":
        return 0 < alpha < 1 or alpha > 1
    if family == "measured":
        return alpha > 1
    raise ValueError(f"unknown divergence family {family!r}")


def check_alpha(family: str, alpha: float) -> float:
    alpha = float(alpha)
    if not _in_range(family, alpha):
        raise AlphaRangeError(f"alpha={alpha!r} outside the validity range of the {family} divergence")
    return alpha


def _mat(x) -> np.ndarray:
    return x.matrix if isinstance(x, DensityOperator) else np.asarray(x, dtype=complex)


def _spectrum(x):
    if isinstance(x, DensityOperator):
        return x.spectrum
    w, U = np.linalg.eigh(_mat(x))
    return w, U


@dataclass
class _Restricted:
    """``rho`` expressed in the eigenbasis of ``sigma`` restricted to supp(sigma)."""

    q: np.ndarray  # support eigenvalues of sigma
    V: np.ndarray  # corresponding eigenvectors (columns)
    rho: np.ndarray  # V^dagger rho V
    support_ok: bool
    leak: float = field(default=0.0)


def _restrict(rho, sigma) -> _Restricted:
    w, U = _spectrum(sigma)
    mask = support_mask(w)
    V = U[:, mask]
    R = V.conj().T @ _mat(rho) @ V
    R = (R + R.conj().T) / 2
    leak = float(np.trace(_mat(rho)).real - np.trace(R).real)
    return _Restricted(w[mask], V, R, leak <= SUPPORT_LEAK_TOL, leak)


def _positive_eigs(M: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(M)
    return w[support_mask(w)]


# ---------------------------------------------------------------- entropies


def renyi_entropy_probs(p, alpha: float) -> float:
    """Rényi entropy of a probability vector (0 log 0 := 0)."""
    alpha = float(alpha)
    if alpha <= 0:
        raise AlphaRangeError(f"Rényi entropy needs alpha > 0, got {alpha!r}")
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    if alpha == 1:
        return float(-np.sum(p * np.log(p)))
    if math.isinf(alpha):
        return float(-np.log(p.max()))
    return float(logsumexp(alpha * np.log(p)) / (1 - alpha))


def renyi_entropy(rho, alpha: float) -> float:
    """``S_alpha(rho) = log Tr[rho^alpha] / (1 - alpha)``; von Neumann at alpha = 1."""
    w = rho.eigenvalues if isinstance(rho, DensityOperator) else np.linalg.eigvalsh(_mat(rho))
    w = np.where(support_mask(w), w, 0.0)
    return renyi_entropy_probs(w, alpha)


def von_neumann_entropy(rho) -> float:
    return renyi_entropy(rho, 1.0)


# ---------------------------------------------------------------- classical


def classical_renyi(P, Q, alpha: float) -> float:
    """Classical Rényi divergence ``log sum P^alpha Q^(1-alpha) / (alpha - 1)``.

    Conventions: terms with ``P(x) = 0`` vanish; ``P(x) > 0 = Q(x)`` gives
    ``+inf`` for ``alpha > 1``; ``alpha = 1`` is the Kullback-Leibler divergence
    and ``alpha = inf`` the log of the max likelihood ratio.
    """
    P = np.asarray(P, dtype=float).ravel()
    Q = np.asarray(Q, dtype=float).ravel()
    if P.shape != Q.shape:
        raise ValueError(f"shape mismatch {P.shape} vs {Q.shape}")
    if np.any(P < 0) or np.any(Q < 0):
        raise ValueError("probability vectors must be nonnegative")
    for name, v in (("P", P), ("Q", Q)):
        if abs(v.sum() - 1) > 1e-10:
            raise ValueError(f"{name} sums to {v.sum()!r}, expected 1")
    alpha = float(alpha)
    if alpha <= 0:
        raise AlphaRangeError(f"alpha must be positive, got {alpha!r}")
    pos = P > 0
    both = pos & (Q > 0)
    if alpha >= 1 and np.any(pos & (Q == 0)):
        return math.inf
    if alpha == 1:
        return float(np.sum(P[both] * (np.log(P[both]) - np.log(Q[both]))))
    if math.isinf(alpha):
        return float(np.max(np.log(P[both]) - np.log(Q[both])))
    if not np.any(both):
        return math.inf
    lse = logsumexp(alpha * np.log(P[both]) + (1 - alpha) * np.log(Q[both]))
    return float(lse / (alpha - 1))


# ---------------------------------------------------------------- quantum families


def umegaki(rho, sigma) -> DivergenceValue:
    """``Tr[rho log rho - rho log sigma]``."""
    r = _restrict(rho, sigma)
    if not r.support_ok:
        return DivergenceValue(math.inf, False, family="umegaki", alpha=1.0)
    p = _positive_eigs(_mat(rho))
    neg_entropy = float(np.sum(p * np.log(p)))
    cross = float(np.sum(np.diag(r.rho).real * np.log(r.q)))
    return DivergenceValue(neg_entropy - cross, True, family="umegaki", alpha=1.0)


def _petz_value(rho, sigma, alpha: float) -> DivergenceValue:
    r = _restrict(rho, sigma)
    if not r.support_ok:
        return DivergenceValue(math.inf, False, family="petz", alpha=alpha)
    w, U = _spectrum(rho)
    keep = support_mask(w)
    p, U = w[keep], U[:, keep]
    overlap = np.abs(r.V.conj().T @ U) ** 2  # [j, i] = |<v_j|u_i>|^2
    with np.errstate(divide="ignore"):
        terms = alpha * np.log(p)[None, :] + (1 - alpha) * np.log(r.q)[:, None] + np.log(overlap)
    lse = logsumexp(terms)
    if not np.isfinite(lse):
        return DivergenceValue(math.inf, True, family="petz", alpha=alpha)
    return DivergenceValue(float(lse / (alpha - 1)), True, family="petz", alpha=alpha)


def petz(rho, sigma, alpha: float) -> DivergenceValue:
    """Petz divergence ``log Tr[rho^alpha sigma^(1-alpha)] / (alpha - 1)``."""
    if alpha == 1:
        return umegaki(rho, sigma)
    return _petz_value(rho, sigma, check_alpha("petz", alpha))


def _sandwiched_value(rho, sigma, alpha: float) -> DivergenceValue:
    r = _restrict(rho, sigma)
    if alpha > 1 and not r.support_ok:
        return DivergenceValue(math.inf, False, family="sandwiched", alpha=alpha)
    gamma = (1 - alpha) / (2 * alpha)
    s = r.q**gamma
    x = _positive_eigs(s[:, None] * r.rho * s[None, :])
    if x.size == 0:
        return DivergenceValue(math.inf, r.support_ok, family="sandwiched", alpha=alpha)
    lse = logsumexp(alpha * np.log(x))
    return DivergenceValue(float(lse / (alpha - 1)), r.support_ok, family="sandwiched", alpha=alpha)


def sandwiched(rho, sigma, alpha: float) -> DivergenceValue:
    """Sandwiched divergence ``log Tr[(sigma^g rho sigma^g)^alpha] / (alpha - 1)``, ``g = (1-alpha)/2alpha``."""
    if alpha == 1:
        return umegaki(rho, sigma)
    if math.isinf(alpha):
        return maximal(rho, sigma)
    return _sandwiched_value(rho, sigma, check_alpha("sandwiched", alpha))


def _geometric_parts(rho, sigma):
    """Eigen-data of ``sigma^-1/2 rho sigma^-1/2`` on supp(sigma) and the sigma weights."""
    r = _restrict(rho, sigma)
    s = r.q**-0.5
    mu, W = np.linalg.eigh(s[:, None] * r.rho * s[None, :])
    weights = (np.abs(W) ** 2 * r.q[:, None]).sum(axis=0)
    return r, mu, weights


def geometric(rho, sigma, alpha: float) -> DivergenceValue:
    """Geometric divergence ``log Tr[sigma (sigma^-1/2 rho sigma^-1/2)^alpha] / (alpha - 1)``.

    ``alpha = 1`` gives the Belavkin-Staszewski relative entropy (the
    alpha -> 1 limit of this family), ``alpha = inf`` the maximal divergence.
    """
    if math.isinf(alpha):
        return maximal(rho, sigma)
    if alpha != 1:
        alpha = check_alpha("geometric", alpha)
    r, mu, weights = _geometric_parts(rho, sigma)
    if not r.support_ok:
        return DivergenceValue(math.inf, False, family="geometric", alpha=alpha)
    keep = support_mask(mu)
    mu, weights = mu[keep], weights[keep]
    if alpha == 1:
        value = float(np.sum(weights * mu * np.log(mu)))
        return DivergenceValue(value, True, family="geometric", alpha=1.0)
    lse = logsumexp(alpha * np.log(mu) + np.log(weights))
    return DivergenceValue(float(lse / (alpha - 1)), True, family="geometric", alpha=alpha)


def maximal(rho, sigma) -> DivergenceValue:
    """``log inf{lambda : rho <= lambda sigma}`` via the top eigenvalue of ``sigma^-1/2 rho sigma^-1/2``."""
    r, mu, _ = _geometric_parts(rho, sigma)
    if not r.support_ok:
        return DivergenceValue(math.inf, False, family="maximal", alpha=math.inf)
    return DivergenceValue(float(np.log(mu[-1])), True, family="maximal", alpha=math.inf)


# ---------------------------------------------------------------- measured


def measured_alpha2(rho, sigma) -> tuple[DivergenceValue, np.ndarray]:
    """Closed-form measured divergence at alpha = 2.

    The optimizer solves ``sigma w + w sigma = 2 rho``; in the eigenbasis of
    sigma this is ``w_ij = 2 rho_ij / (q_i + q_j)``. Returns the divergence
    and the optimizer ``w`` (zero off supp(sigma)).
    """
    r = _restrict(rho, sigma)
    D = r.V.shape[0]
    if not r.support_ok:
        return DivergenceValue(math.inf, False, family="measured", alpha=2.0), np.zeros((D, D), complex)
    w_t = 2 * r.rho / (r.q[:, None] + r.q[None, :])
    objective = 2 * np.trace(r.rho @ w_t).real - np.sum(r.q[:, None] * np.abs(w_t) ** 2)
    omega = r.V @ w_t @ r.V.conj().T
    omega = (omega + omega.conj().T) / 2
    return DivergenceValue(float(np.log(objective)), True, family="measured", alpha=2.0), omega


def stationarity_residual(rho, sigma, omega) -> float:
    """Operator norm of ``2 rho - sigma w - w sigma``."""
    R, S = _mat(rho), _mat(sigma)
    X = 2 * R - S @ omega - omega @ S
    return float(np.max(np.abs(np.linalg.eigvalsh((X + X.conj().T) / 2))))


def measured_objective(rho, sigma, omega, alpha: float) -> float:
    """``alpha Tr[rho w^(alpha-1)] + (1-alpha) Tr[sigma w^alpha]`` for positive ``w``."""
    lam, U = np.linalg.eigh(omega)
    lam = np.clip(lam, 0.0, None)
    R = U.conj().T @ _mat(rho) @ U
    S = U.conj().T @ _mat(sigma) @ U
    return float(
        alpha * np.sum(np.diag(R).real * lam ** (alpha - 1))
        + (1 - alpha) * np.sum(np.diag(S).real * lam**alpha)
    )


@dataclass(frozen=True)
class AscentOptions:
    max_iters: int = 20_000
    ftol: float = 1e-15  # relative objective change counted as converged
    gtol: float = 1e-12  # projected-gradient tolerance
    memory: int = 30  # L-BFGS history length
    init: str = "identity"  # or "alpha2": start from the closed-form alpha = 2 optimizer


def _first_divided_difference(lam: np.ndarray, p: float) -> np.ndarray:
    """Matrix of ``(a^p - b^p)/(a - b)`` over eigenvalue pairs, stable near a = b."""
    a, b = lam[:, None], lam[None, :]
    u = np.log(a) - np.log(b)
    with np.errstate(all="ignore"):
        ratio = np.where(np.abs(u) < 1e-6, p * (1 + (p - 1) * u / 2), np.expm1(p * u) / np.expm1(u))
    return b ** (p - 1) * ratio


class _NuObjective:
    """Concave objective ``alpha Tr[rho v^p] - (alpha-1) Tr[diag(q) v]`` with ``v = w^alpha``.

    Evaluates to the same numbers as the ``w`` objective; ``p = 1 - 1/alpha``.
    """

    def __init__(self, rho_t: np.ndarray, q: np.ndarray, alpha: float):
        self.rho, self.q, self.alpha = rho_t, q, alpha
        self.p = 1 - 1 / alpha

    def value(self, lam, U) -> float:
        R = U.conj().T @ self.rho @ U
        lin = np.sum(self.q[:, None] * np.abs(U) ** 2 * lam[None, :])
        return float(self.alpha * np.sum(np.diag(R).real * lam**self.p) - (self.alpha - 1) * lin)

    def gradient(self, lam, U) -> np.ndarray:
        R = U.conj().T @ self.rho @ U
        G = U @ (R * _first_divided_difference(lam, self.p)) @ U.conj().T
        G = self.alpha * G - (self.alpha - 1) * np.diag(self.q)
        return (G + G.conj().T) / 2


def measured_variational(rho, sigma, alpha: float, opts: AscentOptions | None = None) -> DivergenceValue:
    """Measured Rényi divergence for ``alpha > 1`` from the variational formula.

    The supremum runs over positive ``v = w^alpha``, where the objective is
    concave. We parametrize ``v = A A^dagger`` with unconstrained complex ``A``
    (so positivity never needs enforcing) and maximize with L-BFGS using the
    analytic gradient ``2 grad_v(f) A``.
    """

    opts = opts or AscentOptions()
    alpha = check_alpha("measured", alpha)
    r = _restrict(rho, sigma)
    if not r.support_ok:
        return DivergenceValue(math.inf, False, family="measured", alpha=alpha)
    n = r.q.size
    obj = _NuObjective(r.rho, r.q, alpha)

    if opts.init == "alpha2":
        _, omega = measured_alpha2(rho, sigma)
        w0 = r.V.conj().T @ omega @ r.V
        lam, U = np.linalg.eigh((w0 + w0.conj().T) / 2)
        lam = np.maximum(lam, 1e-8 * lam[-1])
        A0 = U * lam[None, :] ** (alpha / 2)
    elif opts.init == "identity":
        A0 = np.eye(n, dtype=complex)
    else:
        raise ValueError(f"unknown init {opts.init!r}")

    def unpack(z):
        return (z[: n * n] + 1j * z[n * n :]).reshape(n, n)

    def neg_f_and_grad(z):
        A = unpack(z)
        lam, U = np.linalg.eigh(A @ A.conj().T)
        lam = np.maximum(lam, 1e-300)
        GA = 2 * obj.gradient(lam, U) @ A
        return -obj.value(lam, U), -np.concatenate([GA.real.ravel(), GA.imag.ravel()])

    z0 = np.concatenate([A0.real.ravel(), A0.imag.ravel()])
    res = minimize(
        neg_f_and_grad,
        z0,
        jac=True,
        method="L-BFGS-B",
        options=dict(maxiter=opts.max_iters, ftol=opts.ftol, gtol=opts.gtol, maxcor=opts.memory),
    )
    f = -float(res.fun)
    gap = float(np.max(np.abs(res.jac))) if res.jac is not None else math.nan
    converged = bool(res.success) or res.nit < opts.max_iters
    if not converged:
        warnings.warn(
            f"measured divergence ascent hit max_iters={opts.max_iters}; gradient norm {gap:.3e}",
            ConvergenceWarning,
            stacklevel=2,
        )
    return DivergenceValue(
        float(np.log(f) / (alpha - 1)),
        True,
        iterations=int(res.nit),
        gap_estimate=gap,
        converged=converged,
        family="measured",
        alpha=alpha,
    )


def measured(rho, sigma, alpha: float, opts: AscentOptions | None = None) -> DivergenceValue:
    """Measured divergence: closed form at alpha = 2, ascent for other alpha > 1."""
    if alpha == 2:
        return measured_alpha2(rho, sigma)[0]
    return measured_variational(rho, sigma, alpha, opts)


def measured_in_basis(rho, sigma, basis, alpha: float) -> float:
    """Classical divergence of the projective measurement in ``basis`` (columns).

    A lower bound on the measured divergence for any basis.
    """
    B = np.asarray(basis)
    P = np.clip(np.einsum("ij,ik,kj->j", B.conj(), _mat(rho), B).real, 0, None)
    Q = np.clip(np.einsum("ij,ik,kj->j", B.conj(), _mat(sigma), B).real, 0, None)
    return classical_renyi(P / P.sum(), Q / Q.sum(), alpha)


# ---------------------------------------------------------------- dispatch


def divergence(rho, sigma, family: str, alpha: float | None = None, opts=None) -> DivergenceValue:
    if family == "umegaki":
        return umegaki(rho, sigma)
    if family == "maximal":
        return maximal(rho, sigma)
    if alpha is None:
        raise ValueError(f"the {family} divergence needs alpha")
    if family == "petz":
        return petz(rho, sigma, alpha)
    if family == "sandwiched":
        return sandwiched(rho, sigma, alpha)
    if family == "geometric":
        return geometric(rho, sigma, alpha)
    if family == "measured":
        return measured(rho, sigma, alpha, opts)
    raise ValueError(f"unknown divergence family {family!r}")


def split_marginals(rho: DensityOperator, cut: Sequence[int]):
    """Return ``(rho_AB, rho_A (x) rho_B)`` with factors reordered as A then B."""
    n = len(rho.dims)
    A = sorted(set(cut))
    if not A or any(i < 0 or i >= n for i in A):
        raise ValueError(f"cut {list(cut)} is not a nonempty subset of the {n} factors")
    B = [i for i in range(n) if i not in A]
    if not B:
        raise ValueError("cut leaves the B side empty")
    rho_A, rho_B = partial_trace(rho, A), partial_trace(rho, B)
    ordered = rho.reorder(A + B) if A + B != list(range(n)) else rho
    prod_state = DensityOperator(kron(rho_A, rho_B), rho_A.dims + rho_B.dims)
    return ordered, prod_state, rho_A, rho_B


def mutual_information(
    rho: DensityOperator,
    cut: Sequence[int],
    variant: str = "umegaki",
    alpha: float | None = None,
    opts: AscentOptions | None = None,
) -> DivergenceValue:
    """Mutual information between the factors in ``cut`` (A) and the rest (B).

    ``entropy_alpha`` is ``S_a(A) + S_a(B) - S_a(AB)`` and can be negative; every
    other variant is ``D(rho_AB || rho_A (x) rho_B)`` for that divergence family.
    """
    if variant not in MI_VARIANTS:
        raise ValueError(f"unknown mutual-information variant {variant!r}")
    needs_alpha = variant not in ("umegaki", "maximal")
    if needs_alpha and alpha is None:
        raise ValueError(f"variant {variant!r} needs alpha")
    joint, prod_state, rho_A, rho_B = split_marginals(rho, cut)
    if variant == "entropy_alpha":
        value = renyi_entropy(rho_A, alpha) + renyi_entropy(rho_B, alpha) - renyi_entropy(joint, alpha)
        return DivergenceValue(value, True, family="entropy_alpha", alpha=alpha)
    return divergence(joint, prod_state, variant, alpha, opts)
