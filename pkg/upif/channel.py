"""
Rayleigh channel sampling, sorted SVD and the real-domain forward model.

The receiver-side rotation ``W^H Y`` is folded into ``apply_channel``: the
simulator produces ``Y' = sqrt(rho) * Sigma_r @ P @ X + Z'`` directly, which is
legitimate because a fixed unitary leaves the CN(0, 1) noise law unchanged.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.random import Generator, SeedSequence, default_rng

from .exceptions import DimensionError, DomainError
from .lattice import complex_to_real


logger = logging.getLogger(__name__)

REAL_NOISE_VARIANCE = 0.5

# stable identifiers for per-trial random substreams
STREAM_ROLES = {
    "channel": 0,
    "codeword": 1,
    "noise": 2,
    "dither": 3,
}


def trial_rng(master_seed: int, trial_index: int, role: str) -> Generator:
    """
    Independent random stream for one (trial, role) pair.

    Streams depend only on the master seed, the trial index and the role,
    never on scheduling, so results are identical under any thread count.
    """
    if role not in STREAM_ROLES:
        raise DomainError(f"Unknown random stream role: {role}")
    seq = SeedSequence(entropy=int(master_seed), spawn_key=(int(trial_index), STREAM_ROLES[role]))
    return default_rng(seq)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Complex n×n channel matrix with a reproducibility tag."""

    h: np.ndarray
    seed_tag: int = 0

    def __post_init__(self):
        h = np.array(self.h, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
            raise DimensionError(f"Channel must be a square n×n matrix, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise DomainError("Channel contains non-finite entries")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True, eq=False)
class SvdTriple:
    """``H = W @ diag(sigma) @ V^H`` with sigma sorted in descending order."""

    w: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def condition_number(self) -> float:
        return float(self.sigma[0] / self.sigma[-1]) if self.sigma[-1] > 0 else float("inf")


def sample_channel(n: int, rng: Generator, seed_tag: int = 0) -> ChannelRealization:
    """
    Draw an i.i.d. CN(0, 1) channel.

    Real and imaginary parts are independent Gaussians of variance 1/2.
    """
    if n < 1:
        raise DomainError(f"Number of antennas must be at least 1, got {n}")
    h = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    return ChannelRealization(h, seed_tag)


def svd_sorted(channel: ChannelRealization) -> SvdTriple:
    """
    Singular value decomposition with descending singular values.

    Raises:
        DomainError: If the channel has non-finite entries
    """
    h = np.asarray(channel.h if isinstance(channel, ChannelRealization) else channel, dtype=complex)
    if not np.all(np.isfinite(h)):
        raise DomainError("Cannot decompose a channel with non-finite entries")
    w, sigma, vh = np.linalg.svd(h)
    # numpy already sorts descending; keep the ordering explicit
    order = np.argsort(-sigma, kind="stable")
    return SvdTriple(w[:, order], sigma[order], vh[order].conj().T)


def real_sigma(sigma) -> np.ndarray:
    """Diagonal of ``Sigma_r``: each singular value appears for the real and imaginary part."""
    return np.diag(complex_to_real(np.diag(np.asarray(sigma, dtype=float)))).copy()


def apply_channel(
    x: np.ndarray,
    sigma,
    p,
    rho: float,
    rng: Optional[Generator] = None,
) -> np.ndarray:
    """
    Real forward model ``Y' = sqrt(rho) * Sigma_r @ P @ X + Z'``.

    Args:
        x: Real 2n×2n codeword matrix, one transmitted vector per column
        sigma: Singular values (length n)
        p: Precoder or real 2n×2n orthogonal matrix
        rho: Per-antenna SNR (SNR / n)
        rng: Noise stream; ``None`` gives the noiseless output

    Returns:
        np.ndarray: Received 2n×2n matrix

    Raises:
        DimensionError: If shapes are inconsistent
    """
    sigma = np.asarray(sigma, dtype=float).ravel()
    p_mat = np.asarray(getattr(p, "p", p), dtype=float)
    x = np.asarray(x, dtype=float)
    dim = 2 * sigma.size

    if p_mat.shape != (dim, dim):
        raise DimensionError(f"Precoder must be {dim}×{dim}, got {p_mat.shape}")
    if x.ndim != 2 or x.shape[0] != dim:
        raise DimensionError(f"Codeword must have {dim} rows, got shape {x.shape}")
    if rho < 0:
        raise DomainError(f"rho must be nonnegative, got {rho}")

    y = np.sqrt(rho) * (real_sigma(sigma)[:, None] * (p_mat @ x))
    if rng is not None:
        y = y + np.sqrt(REAL_NOISE_VARIANCE) * rng.standard_normal(y.shape)
    return y
