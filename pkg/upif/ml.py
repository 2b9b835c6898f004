"""
Maximum-likelihood baseline: box-constrained Schnorr-Euchner sphere decoding.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .channel import real_sigma
from .codebook import symbol_spacing
from .exceptions import DegeneracyError, DimensionError, DomainError
from .lattice import LatticeBasis, RANK_TOL


logger = logging.getLogger(__name__)

_TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteCodebookLattice:
    """Lattice generator (row convention) restricted to symbols in ``[low, high]`` per coordinate."""

    generator: np.ndarray
    symbol_range: Tuple[int, int]

    def __post_init__(self):
        basis = LatticeBasis(self.generator)
        low, high = (int(x) for x in self.symbol_range)
        if high < low:
            raise DomainError(f"Empty symbol range [{low}, {high}]")
        object.__setattr__(self, "generator", basis.generator)
        object.__setattr__(self, "symbol_range", (low, high))

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    @property
    def codebook_size(self) -> int:
        low, high = self.symbol_range
        return (high - low + 1) ** self.dim


def _babai_point(z: np.ndarray, r_mat: np.ndarray, low: int, high: int) -> np.ndarray:
    """Nearest-plane point with each coordinate clipped into the box."""
    d = r_mat.shape[0]
    s = np.zeros(d, dtype=np.int64)
    for level in range(d - 1, -1, -1):
        center = (z[level] - r_mat[level, level + 1:] @ s[level + 1:]) / r_mat[level, level]
        s[level] = min(max(int(np.rint(center)), low), high)
    return s


def sphere_decode_with_stats(y, lat: FiniteCodebookLattice) -> Tuple[np.ndarray, int]:
    """
    Exact box-constrained closest point and the number of complete candidates visited.

    Minimizes ``||y - s @ generator||`` over integer ``s`` in the symbol box;
    equal distances are resolved toward the lexicographically smaller ``s``.
    """
    y = np.asarray(y, dtype=float).ravel()
    d = lat.dim
    if y.size != d:
        raise DimensionError(f"Received vector must have length {d}, got {y.size}")
    low, high = lat.symbol_range

    # ||y - s G|| = ||Q^T y^T - R s^T|| with G^T = Q R
    q_mat, r_mat = np.linalg.qr(lat.generator.T)
    if np.abs(np.diag(r_mat)).min() <= RANK_TOL:
        raise DegeneracyError("Codebook generator is singular")
    z = q_mat.T @ y

    best = _babai_point(z, r_mat, low, high)
    residual = z - r_mat @ best
    best_dist = float(residual @ residual)
    symbols = np.arange(low, high + 1)
    s = np.zeros(d, dtype=np.int64)
    visited = 0

    def search(level: int, partial: float):
        nonlocal best, best_dist, visited
        center = (z[level] - r_mat[level, level + 1:] @ s[level + 1:]) / r_mat[level, level]
        # zig-zag order around the center, restricted to the box
        order = sorted(symbols, key=lambda v: (abs(v - center), v))
        for value in order:
            step = r_mat[level, level] * (value - center)
            dist = partial + step * step
            if dist > best_dist * (1.0 + _TIE_RTOL) + _TIE_RTOL:
                break
            s[level] = value
            if level == 0:
                visited += 1
                tie = abs(dist - best_dist) <= _TIE_RTOL * max(1.0, best_dist)
                if tie:
                    if tuple(s) < tuple(best):
                        best = s.copy()
                        best_dist = min(dist, best_dist)
                elif dist < best_dist:
                    best, best_dist = s.copy(), dist
            else:
                search(level - 1, dist)
        s[level] = 0

    search(d - 1, 0.0)
    return best, visited


def sphere_decode(y, lat: FiniteCodebookLattice) -> np.ndarray:
    """
    Closest codebook point to ``y`` (exact ML for Gaussian noise).

    The search radius starts at the Babai point and shrinks with every
    improvement.
    """
    return sphere_decode_with_stats(y, lat)[0]


def _independent_blocks(matrix: np.ndarray) -> List[np.ndarray]:
    """Index sets of the connected blocks of a (permuted) block-diagonal matrix."""
    dim = matrix.shape[0]
    coupled = np.abs(matrix) > RANK_TOL
    coupled = coupled | coupled.T
    unseen = set(range(dim))
    blocks = []
    while unseen:
        stack = [min(unseen)]
        block = set()
        while stack:
            node = stack.pop()
            if node in block:
                continue
            block.add(node)
            stack.extend(int(k) for k in np.flatnonzero(coupled[node]) if k not in block)
        unseen -= block
        blocks.append(np.array(sorted(block)))
    return blocks


def ml_decode(y_prime: np.ndarray, sigma, precoder, rho: float, g: int) -> np.ndarray:
    """
    Column-by-column ML decoding of a received 2n×2n block.

    The effective channel ``sqrt(rho) * delta * Sigma_r P`` is split into its
    independent blocks (the rotated pairs of an X-code, or a single block for
    full rotations) and each block is sphere decoded on its own.

    Returns:
        np.ndarray: Integer symbols in ``0..g-1``
    """
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    p_mat = np.asarray(getattr(precoder, "p", precoder), dtype=float)
    y_prime = np.asarray(y_prime, dtype=float)
    dim = p_mat.shape[0]
    if y_prime.shape[0] != dim:
        raise DimensionError(f"Received block must have {dim} rows, got {y_prime.shape}")

    delta = symbol_spacing(g)
    channel = math.sqrt(rho) * delta * (real_sigma(sigma)[:, None] * p_mat)
    # received = channel @ (c - offset) + noise
    shifted = y_prime + channel @ np.full(dim, (g - 1) / 2.0)[:, None]

    decoded = np.zeros(y_prime.shape, dtype=np.int64)
    for block in _independent_blocks(channel):
        lat = FiniteCodebookLattice(channel[np.ix_(block, block)].T, (0, g - 1))
        for col in range(y_prime.shape[1]):
            decoded[block, col] = sphere_decode(shifted[block, col], lat)
    return decoded
