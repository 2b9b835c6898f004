"""
Integer-forcing linear receiver.

The real model is ``Y' = sqrt(rho) * Sigma_r @ P @ X + Z'``. The receiver filters
with ``B`` so that ``B @ Y' / sqrt(rho)`` is close to ``A @ X`` for a unimodular
integer ``A``, rounds, and undoes ``A`` over the integers.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channel import real_sigma
from .codebook import symbol_spacing
from .exceptions import ContractViolationError, DimensionError, DomainError
from .lattice import DEFAULT_NODE_BUDGET, LatticeBasis, lll_reduce, successive_minima
from .precoders import Precoder


logger = logging.getLogger(__name__)

UNIMODULAR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EffectiveChannel:
    """Channel seen by the IF receiver: ``L L^T = (I + rho Sigma_r^T Sigma_r)^-1`` and ``L_p = P^T L``."""

    sigma: np.ndarray
    p: Precoder
    rho: float
    l: np.ndarray
    l_p: np.ndarray

    @property
    def dim(self) -> int:
        return self.l.shape[0]

    @property
    def n_complex(self) -> int:
        return self.dim // 2

    @property
    def sigma_p(self) -> np.ndarray:
        """``Sigma_r @ P``."""
        return real_sigma(self.sigma)[:, None] * self.p.p


@dataclass(frozen=True, eq=False)
class IfSolution:
    """Integer matrix A, filter B and the per-layer noise energies and SNRs."""

    a: np.ndarray
    b: np.ndarray
    g_per_layer: np.ndarray
    snr_eff: np.ndarray


def build_effective_channel(sigma, p: Precoder, rho: float) -> EffectiveChannel:
    """
    Effective channel for the IF receiver.

    ``L`` is the closed-form diagonal ``1 / sqrt(1 + rho sigma_m^2)`` with every
    singular value repeated for the real and imaginary parts.

    Raises:
        DomainError: If rho is negative or sigma has negative entries
        DimensionError: If the precoder size does not match sigma
    """
    sigma = np.asarray(sigma, dtype=float).ravel()
    if rho < 0 or not np.isfinite(rho):
        raise DomainError(f"rho must be finite and nonnegative, got {rho}")
    if np.any(sigma < 0):
        raise DomainError(f"Singular values must be nonnegative, got {sigma}")
    dim = 2 * sigma.size
    if p.dim != dim:
        raise DimensionError(f"Precoder must be {dim}×{dim} for {sigma.size} singular values, got {p.dim}")

    l = np.diag(1.0 / np.sqrt(1.0 + rho * real_sigma(sigma) ** 2))
    l_p = p.p.T @ l
    return EffectiveChannel(sigma=sigma, p=p, rho=float(rho), l=l, l_p=l_p)


def select_integer_matrix(ec: EffectiveChannel) -> np.ndarray:
    """
    Unimodular integer matrix A from LLL on the lattice spanned by the rows of ``L_p``.

    Rows of A are sorted by increasing ``rho * ||a L_p||^2``. The input rows are
    sorted by norm first, which keeps the best layer at least as good as with
    ``A = I``.
    """
    gen = ec.l_p
    order = np.argsort(np.einsum("ij,ij->i", gen, gen), kind="stable")
    permutation = np.eye(ec.dim, dtype=np.int64)[order]

    _, u = lll_reduce(LatticeBasis(permutation @ gen))
    a = u @ permutation

    energies = np.einsum("ij,ij->i", a @ gen, a @ gen)
    return a[np.argsort(energies, kind="stable")]


def compute_filter(a: np.ndarray, ec: EffectiveChannel) -> np.ndarray:
    """
    MMSE-optimal filter ``B = rho A (Sigma_r P)^T S^-1`` with ``S = I + rho Sigma_r P (Sigma_r P)^T``.

    ``S`` is inverted through its Cholesky factorization.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (ec.dim, ec.dim):
        raise DimensionError(f"A must be {ec.dim}×{ec.dim}, got {a.shape}")
    sp = ec.sigma_p
    s = np.eye(ec.dim) + ec.rho * (sp @ sp.T)
    # S symmetric: (S^-1 M A^T)^T = A M^T S^-1
    return ec.rho * cho_solve(cho_factor(s), sp @ a.T).T


def noise_energy(a_m, b_m, ec: EffectiveChannel) -> float:
    """Effective noise energy ``rho ||b_m Sigma_r P - a_m||^2 + ||b_m||^2`` of one layer."""
    a_m = np.asarray(a_m, dtype=float).ravel()
    b_m = np.asarray(b_m, dtype=float).ravel()
    if a_m.size != ec.dim or b_m.size != ec.dim:
        raise DimensionError(f"Layer vectors must have length {ec.dim}")
    residual = b_m @ ec.sigma_p - a_m
    return float(ec.rho * residual @ residual + b_m @ b_m)


def solve_integer_forcing(ec: EffectiveChannel) -> IfSolution:
    """A, B and per-layer figures for one channel realization."""
    if not ec.rho > 0:
        raise DomainError("Integer forcing needs rho > 0")
    a = select_integer_matrix(ec)
    b = compute_filter(a, ec)
    projected = a @ ec.l_p
    g = ec.rho * np.einsum("ij,ij->i", projected, projected)
    return IfSolution(a=a, b=b, g_per_layer=g, snr_eff=ec.rho / g)


def _integer_inverse(a: np.ndarray) -> np.ndarray:
    a_int = np.rint(np.asarray(a, dtype=float)).astype(np.int64)
    if not np.allclose(a, a_int) or abs(abs(np.linalg.det(a_int)) - 1.0) > UNIMODULAR_TOL:
        raise ContractViolationError("Integer matrix A is not unimodular")
    a_inv = np.rint(np.linalg.inv(a_int)).astype(np.int64)
    if not np.array_equal(a_inv @ a_int, np.eye(a_int.shape[0], dtype=np.int64)):
        raise ContractViolationError("Integer inverse of A could not be formed exactly")
    return a_inv


def if_decode(
    y_prime: np.ndarray,
    sol: IfSolution,
    rho: float,
    g: int,
    dither: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Decode a received 2n×2n block to integer symbols in ``0..g-1``.

    ``B @ Y' / sqrt(rho)`` is mapped back to the integer grid of the codebook,
    rounded (half to even), multiplied by ``A^-1`` over the integers and
    reduced mod g.

    Without noise the rounded values carry the MMSE bias
    ``(B Sigma_r P - A) @ (X - offset)``; the decision is exact whenever
    ``decision_bias(sol, ec, g) < 1/2``, which holds once
    ``rho * sigma_min^2`` is large against ``|a_m|_1 (g - 1)``.

    Raises:
        ContractViolationError: If A is not unimodular
    """
    a_inv = _integer_inverse(sol.a)
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")

    delta = symbol_spacing(g)
    y = sol.b @ np.asarray(y_prime, dtype=float)
    combos = y / (math.sqrt(rho) * delta)
    combos += (g - 1) / 2.0 * sol.a.sum(axis=1)[:, None]
    if dither is not None:
        combos -= sol.a @ dither

    rounded = np.rint(combos).astype(np.int64)
    return np.mod(a_inv @ rounded, g)


def decision_bias(sol: IfSolution, ec: EffectiveChannel, g: int) -> float:
    """Worst-case noiseless offset ``max_m ||b_m Sigma_r P - a_m||_1 (g - 1) / 2`` of the rounded layers."""
    residual = sol.b @ ec.sigma_p - sol.a
    return float(np.abs(residual).sum(axis=1).max() * (g - 1) / 2.0)


def theorem1_bound(ec: EffectiveChannel, m: int, budget: int = DEFAULT_NODE_BUDGET) -> float:
    """
    Error-probability bound ``exp(-c eps^2_{2n-m+1})`` of layer m.

    ``eps`` is taken on the lattice generated by ``L_p^-1`` (the dual of the IF
    lattice) and ``c = 1 / (4 ((2n)^3 + (3n)^2))``.
    """
    d = ec.dim
    if not 1 <= m <= d:
        raise DomainError(f"Layer index must lie in 1..{d}, got {m}")
    n = d // 2
    c = 1.0 / (4.0 * ((2 * n) ** 3 + (3 * n) ** 2))
    dual = LatticeBasis.from_columns(np.linalg.inv(ec.l_p))
    eps = successive_minima(dual, d - m + 1, budget)
    return math.exp(-c * eps ** 2)


def woodbury_identity_gap(m1: np.ndarray, m2: np.ndarray) -> float:
    """Max-norm gap between ``I - M1 (I + M2 M1)^-1 M2`` and ``(I + M1 M2)^-1``."""
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    eye_outer = np.eye(m1.shape[0])
    eye_inner = np.eye(m2.shape[0])
    lhs = eye_outer - m1 @ np.linalg.solve(eye_inner + m2 @ m1, m2)
    rhs = np.linalg.inv(eye_outer + m1 @ m2)
    return float(np.abs(lhs - rhs).max())
