"""Entropy-based Rényi mutual information of the classical Ising ring.

The ring carries ``H = sum_i h z_i + J z_i z_{i+1}`` with the temperature
absorbed into ``J`` and ``h`` (``J > 0`` is antiferromagnetic). Basis index 0
is the spin ``-1`` and index 1 the spin ``+1``. Blocks are ``A = {1..L}`` and
``B = {L+1..2L}``; the thermodynamic limit is ``N -> inf`` first, then
``L -> inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import divergences as dv

MAX_ENUM_SITES = 24
SPINS = np.array([-1.0, 1.0])


class DegenerateSpectrumError(ArithmeticError):
    pass


def transfer_matrix(J: float, h: float) -> np.ndarray:
    """``<s|T|s'> = exp(-h (s + s')/2 - J s s')``."""
    s = SPINS
    return np.exp(-h * (s[:, None] + s[None, :]) / 2 - J * np.outer(s, s))


@dataclass(frozen=True)
class TransferPair:
    J: float
    h: float
    alpha: float
    T: np.ndarray
    lam_plus: float
    lam_minus: float
    perron: np.ndarray  # normalized, positive eigenvector of T for lam_plus
    marginals: np.ndarray  # P(z = -1), P(z = +1)
    conditionals: np.ndarray  # [a, b] = P(z_k = a | z_{k-1} = b)
    T_alpha: np.ndarray  # conditionals ** alpha
    P_alpha: np.ndarray  # marginals ** alpha
    t_plus: float
    t_minus: float
    right: np.ndarray  # right eigenvector of T_alpha for t_plus
    left: np.ndarray  # left eigenvector, left @ right = 1


def transfer_matrices(J: float, h: float, alpha: float) -> TransferPair:
    if alpha <= 0:
        raise dv.AlphaRangeError(f"alpha must be positive, got {alpha!r}")
    T = transfer_matrix(J, h)
    w, V = np.linalg.eigh(T)
    lam_minus, lam_plus = float(w[0]), float(w[1])
    if not lam_plus > abs(lam_minus):
        raise DegenerateSpectrumError(f"T has no dominant eigenvalue: {w}")
    v = np.abs(V[:, 1])
    marg = v**2
    cond = T * v[:, None] / (v[None, :] * lam_plus)
    Ta = cond**alpha
    Pa = marg**alpha
    tw, R = np.linalg.eig(Ta)
    tw = tw.real
    i = int(np.argmax(tw))
    t_plus, t_minus = float(tw[i]), float(tw[1 - i])
    if not t_plus > abs(t_minus):
        raise DegenerateSpectrumError(f"T_alpha eigenvalues {tw} have no strictly dominant one")
    right = R[:, i].real
    Rinv = np.linalg.inv(R)
    left = Rinv[i].real
    return TransferPair(J, h, alpha, T, lam_plus, lam_minus, v, marg, cond, Ta, Pa, t_plus, t_minus, right, left)


def _shannon(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def i_alpha_limit(J: float, h: float, alpha: float) -> float:
    """Thermodynamic-limit ``I_alpha(A:B) = log(c_+ / t_+) / (1 - alpha)``.

    ``c_+`` is the weight of ``|P_alpha>`` on the dominant eigenvector of
    ``T_alpha`` as seen by ``<1|``. At ``alpha = 1`` the Markov property gives
    ``I = 2 H(z_1) - H(z_1, z_2)``.
    """
    if alpha == 1:
        tp = transfer_matrices(J, h, 2.0)
        pair = tp.conditionals * tp.marginals[None, :]
        return 2 * _shannon(tp.marginals) - _shannon(pair.ravel())
    tp = transfer_matrices(J, h, alpha)
    c_plus = float(np.sum(tp.right) * (tp.left @ tp.P_alpha))
    return math.log(c_plus / tp.t_plus) / (1 - alpha)


def _log_block_sum(tp: TransferPair, m: int) -> float:
    """``log <1| T_alpha^{m-1} |P_alpha>`` with per-step renormalization."""
    x = tp.P_alpha.copy()
    acc = 0.0
    for _ in range(m - 1):
        x = tp.T_alpha @ x
        s = x.sum()
        acc += math.log(s)
        x /= s
    return acc + math.log(x.sum())


def i_alpha_finite_L(J: float, h: float, alpha: float, L: int) -> float:
    """``I_alpha`` for blocks of length ``L`` on the infinite ring."""
    if alpha == 1:
        raise dv.AlphaRangeError("finite-L formula is stated for alpha != 1")
    tp = transfer_matrices(J, h, alpha)
    return (2 * _log_block_sum(tp, L) - _log_block_sum(tp, 2 * L)) / (1 - alpha)


def _log_block_power_sum(J: float, h: float, alpha: float, N: int, m: int) -> float:
    """``log sum_x P(x)^alpha`` over configurations of ``m`` consecutive sites of an ``N``-ring.

    ``P(s_1..s_m) = Z^{-1} prod_i T[s_i, s_{i+1}] (T^{N-m+1})[s_m, s_1]``, hence
    ``sum P^alpha = Z^{-alpha} Tr[(T^{o alpha})^{m-1} (T^{N-m+1})^{o alpha}]``
    with elementwise powers. ``T`` is scaled by ``lambda_+`` throughout.
    """
    T = transfer_matrix(J, h)
    lam = float(np.linalg.eigvalsh(T)[-1])
    That = T / lam
    Z = float(np.trace(np.linalg.matrix_power(That, N)))
    closing = np.linalg.matrix_power(That, N - m + 1) ** alpha
    chain = np.linalg.matrix_power(That**alpha, m - 1)
    return math.log(float(np.trace(chain @ closing))) - alpha * math.log(Z)


def i_alpha_finite_transfer(N: int, L: int, J: float, h: float, alpha: float) -> float:
    """Finite-ring ``I_alpha`` from transfer matrices (no enumeration)."""
    if 2 * L > N:
        raise ValueError(f"need 2L <= N, got L={L}, N={N}")
    if alpha == 1:
        raise dv.AlphaRangeError("use the enumeration oracle at alpha = 1")
    sA = _log_block_power_sum(J, h, alpha, N, L)
    sAB = _log_block_power_sum(J, h, alpha, N, 2 * L)
    return (2 * sA - sAB) / (1 - alpha)


@lru_cache(maxsize=4)
def _ring_sums(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Magnetization and bond sum of every ring configuration (site 1 = top bit)."""
    idx = np.arange(2**N, dtype=np.int64)
    mag = np.zeros(2**N, dtype=np.int8)
    bond = np.zeros(2**N, dtype=np.int8)
    first = prev = None
    for s in range(N):
        z = (((idx >> (N - 1 - s)) & 1) * 2 - 1).astype(np.int8)
        mag += z
        if prev is not None:
            bond += z * prev
        else:
            first = z
        prev = z
    bond += prev * first
    return mag, bond


def ring_distribution(N: int, J: float, h: float) -> np.ndarray:
    """Boltzmann distribution of the ``N``-ring over all ``2^N`` configurations."""
    if N > MAX_ENUM_SITES:
        raise ValueError(f"N={N} exceeds the enumeration limit {MAX_ENUM_SITES}")
    mag, bond = _ring_sums(N)
    logw = -(h * mag.astype(float) + J * bond.astype(float))
    logw -= logw.max()
    w = np.exp(logw)
    return w / w.sum()


def _block_marginals(p: np.ndarray, N: int, L: int):
    """Marginals of sites ``1..L``, ``L+1..2L`` and ``1..2L`` (leading bits)."""
    pAB = p.reshape(2 ** (2 * L), -1).sum(axis=1)
    grid = pAB.reshape(2**L, 2**L)
    return grid.sum(axis=1), grid.sum(axis=0), pAB


def finite_chain_oracle(N: int, L: int, J: float, h: float, alpha: float, p: np.ndarray | None = None) -> float:
    """Entropy-based ``I_alpha`` of blocks ``{1..L}``, ``{L+1..2L}`` by exact enumeration."""
    if 2 * L >= N:
        raise ValueError(f"need 2L < N, got L={L}, N={N}")
    p = ring_distribution(N, J, h) if p is None else p
    pA, pB, pAB = _block_marginals(p, N, L)
    S = dv.renyi_entropy_probs
    return S(pA, alpha) + S(pB, alpha) - S(pAB, alpha)


def finite_chain_divergence_mi(N: int, L: int, J: float, h: float, alpha: float, p: np.ndarray | None = None) -> float:
    """Divergence-based classical MI ``D_alpha(P_AB || P_A x P_B)`` on the same blocks."""
    if 2 * L >= N:
        raise ValueError(f"need 2L < N, got L={L}, N={N}")
    p = ring_distribution(N, J, h) if p is None else p
    pA, pB, pAB = _block_marginals(p, N, L)
    return dv.classical_renyi(pAB, np.kron(pA, pB), alpha)


def aitken(values: Sequence[float]) -> float:
    """Aitken delta-squared extrapolation from the last three terms of a sequence."""
    if len(values) < 3:
        return float(values[-1])
    x0, x1, x2 = values[-3:]
    den = x2 - 2 * x1 + x0
    if abs(den) < 1e-14 * max(1.0, abs(x2)) or abs(x2 - x1) < 1e-15:
        return float(x2)
    return float(x2 - (x2 - x1) ** 2 / den)


def oracle_extrapolated(
    J: float, h: float, alpha: float, N: int = MAX_ENUM_SITES, Ls: Iterable[int] = range(4, 11)
) -> tuple[float, list[float]]:
    """Enumeration at ring size ``N`` over block sizes ``Ls``, extrapolated in ``L``.

    The bulk error decays like ``r^L`` while the coupling of the blocks the
    other way around the ring grows like ``r^(N - 2L)``; the two balance at
    ``L = N/3``, so Aitken extrapolation uses the last three ``L <= N // 3``.
    Returns the extrapolated value and the raw values for every ``L``.
    """
    Ls = list(Ls)
    p = ring_distribution(N, J, h)
    vals = [finite_chain_oracle(N, L, J, h, alpha, p) for L in Ls]
    clean = [v for L, v in zip(Ls, vals) if L <= N // 3] or vals[:1]
    return aitken(clean), vals


@dataclass(frozen=True)
class SweepRow:
    J: float
    h: float
    alpha: float
    I_alpha_limit: float
    I_oracle: float | None = None
    N: int | None = None
    L: int | None = None


def sweep(
    J_grid: Iterable[float],
    h_list: Iterable[float],
    alpha_list: Iterable[float],
    oracle_N: int | None = None,
    oracle_L: int | None = None,
) -> list[SweepRow]:
    """One row per ``(J, h, alpha)``; optionally with a finite-ring oracle value."""
    rows = []
    for h in h_list:
        for alpha in alpha_list:
            for J in J_grid:
                lim = i_alpha_limit(J, h, alpha)
                orc = None
                if oracle_N is not None and oracle_L is not None:
                    orc = finite_chain_oracle(oracle_N, oracle_L, J, h, alpha)
                rows.append(SweepRow(float(J), float(h), float(alpha), lim, orc, oracle_N, oracle_L))
    return rows


def sign_change(h: float, alpha: float = 2.0, J_max: float = 3.0, grid: int = 301, fn=None) -> float | None:
    """First ``J > 0`` where ``I_alpha`` turns from negative to nonnegative.

    A grid scan brackets the root and Brent's method refines it; returns
    ``None`` when no sign change is found.
    """
    f = fn or (lambda J: i_alpha_limit(J, h, alpha))
    Js = np.linspace(J_max / grid, J_max, grid)
    vals = [f(J) for J in Js]
    for a, b, fa, fb in zip(Js[:-1], Js[1:], vals[:-1], vals[1:]):
        if fa < 0 <= fb:
            return float(brentq(f, a, b, xtol=1e-12))
    return None


def log_partition_ring(N: int, J: float, h: float) -> float:
    """``log Tr[T^N] = log(lambda_+^N + lambda_-^N)`` computed stably."""
    w = np.linalg.eigvalsh(transfer_matrix(J, h))
    lp, lm = w[1], w[0]
    return float(N * math.log(lp) + math.log1p((lm / lp) ** N))


__all__ = [
    "TransferPair",
    "transfer_matrix",
    "transfer_matrices",
    "i_alpha_limit",
    "i_alpha_finite_L",
    "i_alpha_finite_transfer",
    "ring_distribution",
    "finite_chain_oracle",
    "finite_chain_divergence_mi",
    "aitken",
    "oracle_extrapolated",
    "SweepRow",
    "sweep",
    "sign_change",
    "log_partition_ring",
]
