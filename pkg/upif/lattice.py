"""
Real lattice machinery: bases, enumeration, reduction, duals and figures of merit.

Every basis uses the row-vector convention: a lattice point is ``z @ generator``
for an integer row vector ``z``. A lattice written as ``{M v}`` with column
vectors therefore has generator ``M.T`` (see ``LatticeBasis.from_columns``).
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import (
    DegeneracyError,
    DimensionError,
    DomainError,
    EnumerationBudgetError,
    InternalSearchError,
)


logger = logging.getLogger(__name__)

RANK_TOL = 1e-12
EQUALITY_RTOL = 1e-10
DEFAULT_NODE_BUDGET = 10 ** 7
DEFAULT_LLL_DELTA = 0.75
MAX_ENUMERATION_DIM = 8

# relative slack on the squared radius so boundary points are kept
_RADIUS_SLACK = 1e-9
_GAUSS_MAX_ITER = 10_000
_LLL_MAX_ITER = 100_000
_PRODUCT_CHUNK = 200_000


@dataclass(frozen=True, eq=False)
class LatticeBasis:
    """Full-rank real lattice basis whose rows are the basis vectors."""

    generator: np.ndarray

    def __post_init__(self):
        gen = np.array(self.generator, dtype=float)
        if gen.ndim != 2 or gen.shape[0] != gen.shape[1] or gen.shape[0] == 0:
            raise DimensionError(
                f"Generator must be a non-empty square matrix, got shape {gen.shape}"
            )
        if not np.all(np.isfinite(gen)):
            raise DomainError("Generator contains non-finite entries")

        row_norms = np.linalg.norm(gen, axis=1)
        if np.any(row_norms <= RANK_TOL):
            raise DegeneracyError("Generator has a zero row")
        if abs(np.linalg.det(gen / row_norms[:, None])) <= RANK_TOL:
            raise DegeneracyError("Generator is rank deficient")

        gen.setflags(write=False)
        object.__setattr__(self, "generator", gen)

    @classmethod
    def from_columns(cls, matrix) -> "LatticeBasis":
        """Basis of the lattice ``{M v}``: generator rows are the columns of ``M``."""
        return cls(np.asarray(matrix, dtype=float).T)

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    @property
    def gram(self) -> np.ndarray:
        return self.generator @ self.generator.T

    @property
    def volume(self) -> float:
        """Absolute determinant of the generator."""
        return float(abs(np.linalg.det(self.generator)))

    def point(self, coefficients) -> np.ndarray:
        return np.asarray(coefficients) @ self.generator


@dataclass(frozen=True, eq=False)
class ShortVectorReport:
    """A nonzero integer coefficient vector and the squared norm of its lattice point."""

    vector: np.ndarray
    norm_sq: float

    def __post_init__(self):
        vector = np.array(self.vector, dtype=np.int64)
        if not np.any(vector):
            raise DomainError("Short vector report needs a nonzero vector")
        vector.setflags(write=False)
        object.__setattr__(self, "vector", vector)
        object.__setattr__(self, "norm_sq", float(self.norm_sq))

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_sq)


# ---------------------------------------------------------------------
# Complex to real conversion
# ---------------------------------------------------------------------

def complex_to_real(matrix) -> np.ndarray:
    """
    Real 2n×2n form of a complex n×n matrix.

    Uses the block layout ``[[Re M, Im M], [-Im M, Re M]]``, which respects
    matrix products.

    Raises:
        DimensionError: If the input is not square
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"complex_to_real expects a square matrix, got shape {m.shape}")
    re, im = m.real, m.imag
    return np.block([[re, im], [-im, re]])


# ---------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------

def _first_nonzero_positive(vector: np.ndarray) -> bool:
    nonzero = np.flatnonzero(vector)
    return nonzero.size > 0 and vector[nonzero[0]] > 0


def _fincke_pohst(generator: np.ndarray, radius_sq: float, budget: int) -> List[np.ndarray]:
    """All nonzero coefficient vectors (both signs) within the squared radius."""
    d = generator.shape[0]
    # ||z G|| = ||R z|| with G.T = Q R
    _, r_mat = np.linalg.qr(generator.T)
    diag = np.diag(r_mat)

    coeffs = np.zeros(d, dtype=np.int64)
    found = []
    nodes = 0

    def descend(level: int, remaining: float):
        nonlocal nodes
        tail = float(r_mat[level, level + 1:] @ coeffs[level + 1:])
        center = -tail / diag[level]
        half_width = math.sqrt(max(remaining, 0.0)) / abs(diag[level])
        lo = math.ceil(center - half_width)
        hi = math.floor(center + half_width)
        for value in range(lo, hi + 1):
            nodes += 1
            if nodes > budget:
                raise EnumerationBudgetError(budget)
            coeffs[level] = value
            step = diag[level] * (value - center)
            left = remaining - step * step
            if left < 0.0:
                continue
            if level == 0:
                if np.any(coeffs):
                    found.append(coeffs.copy())
            else:
                descend(level - 1, left)
        coeffs[level] = 0

    descend(d - 1, radius_sq * (1.0 + _RADIUS_SLACK))
    logger.debug("Enumeration visited %d nodes, found %d vectors", nodes, len(found))
    return found


def enumerate_short_vectors(
    basis: LatticeBasis,
    radius: float,
    budget: int = DEFAULT_NODE_BUDGET,
) -> List[ShortVectorReport]:
    """
    Enumerate all lattice vectors of norm at most ``radius``.

    One representative of each ``±v`` pair is returned (first nonzero
    coordinate positive), sorted by norm and then lexicographically.

    Args:
        basis: Lattice basis (dimension at most 8)
        radius: Positive, finite search radius
        budget: Maximum number of enumeration nodes

    Returns:
        list: ShortVectorReport entries

    Raises:
        DomainError: If the radius is not positive and finite or the dimension exceeds 8
        EnumerationBudgetError: If more than ``budget`` nodes are visited
    """
    if not np.isfinite(radius) or radius <= 0:
        raise DomainError(f"Enumeration radius must be positive and finite, got {radius}")
    if basis.dim > MAX_ENUMERATION_DIM:
        raise DomainError(f"Enumeration supports d <= {MAX_ENUMERATION_DIM}, got {basis.dim}")

    radius_sq = float(radius) ** 2
    limit = radius_sq * (1.0 + _RADIUS_SLACK)
    reports = []
    for vector in _fincke_pohst(basis.generator, radius_sq, budget):
        if not _first_nonzero_positive(vector):
            continue
        point = vector @ basis.generator
        norm_sq = float(point @ point)
        if norm_sq <= limit:
            reports.append(ShortVectorReport(vector, norm_sq))

    reports.sort(key=lambda rep: (rep.norm_sq, tuple(rep.vector)))
    return reports


def successive_minima(
    basis: LatticeBasis,
    m: int,
    budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """
    The m-th successive minimum of the lattice.

    The radius starts at the shortest row of an LLL-reduced basis and doubles
    until ``m`` independent vectors are found; the m-th shortest reduced row
    caps the search.

    Raises:
        DomainError: If m is not in 1..d
        EnumerationBudgetError: If enumeration exceeds the budget
    """
    d = basis.dim
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= d:
        raise DomainError(f"Successive minimum index must lie in 1..{d}, got {m}")

    reduced, _ = lll_reduce(basis)
    row_norms = np.sort(np.linalg.norm(reduced.generator, axis=1))
    upper = row_norms[m - 1]
    radius = row_norms[0]

    while True:
        radius = min(radius, upper)
        chosen = np.empty((0, d))
        rank = 0
        for rep in enumerate_short_vectors(reduced, radius, budget):
            candidate = np.vstack([chosen, rep.vector])
            if np.linalg.matrix_rank(candidate) > rank:
                chosen = candidate
                rank += 1
                if rank == m:
                    return rep.norm
        if radius >= upper:
            raise InternalSearchError(
                f"Could not find {m} independent vectors within radius {upper}"
            )
        radius *= 2.0


# ---------------------------------------------------------------------
# Reduction
# ---------------------------------------------------------------------

def gauss_reduce_batch(generators) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lagrange-Gauss reduction of a stack of 2D bases.

    Args:
        generators: Array of shape (T, 2, 2), one row-convention basis per entry

    Returns:
        tuple: (reduced bases, integer transforms) with ``reduced[t] = U[t] @ generators[t]``;
        the first row of each reduced basis is a shortest nonzero vector
    """
    gens = np.array(generators, dtype=float)
    if gens.ndim != 3 or gens.shape[1:] != (2, 2):
        raise DimensionError(f"Gauss reduction expects shape (T, 2, 2), got {gens.shape}")
    count = gens.shape[0]

    b1, b2 = gens[:, 0].copy(), gens[:, 1].copy()
    u1 = np.tile(np.array([1, 0], dtype=np.int64), (count, 1))
    u2 = np.tile(np.array([0, 1], dtype=np.int64), (count, 1))

    swap = np.einsum("ij,ij->i", b1, b1) > np.einsum("ij,ij->i", b2, b2)
    b1[swap], b2[swap] = b2[swap], b1[swap]
    u1[swap], u2[swap] = u2[swap], u1[swap]

    active = np.ones(count, dtype=bool)
    for _ in range(_GAUSS_MAX_ITER):
        n1 = np.einsum("ij,ij->i", b1, b1)
        mu = np.where(active, np.rint(np.einsum("ij,ij->i", b1, b2) / n1), 0.0)
        b2 -= mu[:, None] * b1
        u2 -= mu.astype(np.int64)[:, None] * u1

        n2 = np.einsum("ij,ij->i", b2, b2)
        active = active & (n2 < n1)
        if not active.any():
            break
        b1[active], b2[active] = b2[active], b1[active]
        u1[active], u2[active] = u2[active], u1[active]
    else:
        raise InternalSearchError("Gauss reduction did not converge")

    return np.stack([b1, b2], axis=1), np.stack([u1, u2], axis=1)


def gauss_reduce(basis: LatticeBasis) -> LatticeBasis:
    """
    Gauss (Lagrange) reduction of a 2D basis.

    The first output row is a shortest nonzero vector and the second a shortest
    vector independent of it.

    Raises:
        DimensionError: If the basis is not two dimensional
    """
    if basis.dim != 2:
        raise DimensionError(f"Gauss reduction needs d = 2, got d = {basis.dim}")
    _, transforms = gauss_reduce_batch(basis.generator[None])
    return LatticeBasis(transforms[0] @ basis.generator)


def _gram_schmidt(b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt coefficients (unit diagonal) and squared orthogonal norms."""
    d = b.shape[0]
    b_star = np.zeros_like(b)
    mu = np.eye(d)
    b_star_sq = np.zeros(d)
    for i in range(d):
        v = b[i].copy()
        for j in range(i):
            mu[i, j] = (b[i] @ b_star[j]) / b_star_sq[j]
            v -= mu[i, j] * b_star[j]
        b_star[i] = v
        b_star_sq[i] = v @ v
    return mu, b_star_sq


def lll_reduce(
    basis: LatticeBasis,
    delta: float = DEFAULT_LLL_DELTA,
) -> Tuple[LatticeBasis, np.ndarray]:
    """
    LLL reduction.

    Args:
        basis: Full-rank basis
        delta: Lovász parameter in (1/4, 1]

    Returns:
        tuple: (reduced basis, unimodular integer U) with ``reduced = U @ basis``

    Raises:
        DomainError: If delta is outside (1/4, 1]
        DegeneracyError: If the basis is numerically rank deficient
    """
    if not 0.25 < delta <= 1.0:
        raise DomainError(f"LLL delta must lie in (1/4, 1], got {delta}")

    gen = basis.generator
    d = basis.dim
    b = gen.copy()
    u = np.eye(d, dtype=np.int64)

    mu, b_star_sq = _gram_schmidt(b)
    if b_star_sq.min() <= RANK_TOL * b_star_sq.max():
        raise DegeneracyError("LLL input is numerically rank deficient")

    k = 1
    iterations = 0
    while k < d:
        iterations += 1
        if iterations > _LLL_MAX_ITER:
            raise DegeneracyError("LLL did not terminate; basis is too ill-conditioned")

        for j in range(k - 1, -1, -1):
            q = int(np.rint(mu[k, j]))
            if q:
                b[k] -= q * b[j]
                u[k] -= q * u[j]
                mu[k, :j + 1] -= q * mu[j, :j + 1]

        if b_star_sq[k] >= (delta - mu[k, k - 1] ** 2) * b_star_sq[k - 1]:
            k += 1
        else:
            b[[k - 1, k]] = b[[k, k - 1]]
            u[[k - 1, k]] = u[[k, k - 1]]
            mu, b_star_sq = _gram_schmidt(b)
            k = max(k - 1, 1)

    logger.debug("LLL finished after %d iterations (d=%d)", iterations, d)
    return LatticeBasis(u @ gen), u


def dual_basis(basis: LatticeBasis) -> LatticeBasis:
    """
    Dual lattice basis (inverse transpose of the generator).

    Raises:
        DegeneracyError: If the generator cannot be inverted
    """
    try:
        inverse = np.linalg.inv(basis.generator)
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError("Generator is singular; dual lattice undefined") from exc
    return LatticeBasis(inverse.T)


# ---------------------------------------------------------------------
# Figures of merit
# ---------------------------------------------------------------------

def default_search_bound(dim: int) -> int:
    """Coefficient bound for truncated product-distance search."""
    return 8 if dim <= 4 else 3


def min_product_distance(basis: LatticeBasis, search_bound: Optional[int] = None) -> float:
    """
    Minimum product distance over a truncated coefficient box.

    Minimizes ``prod_m |[v @ generator]_m|`` over nonzero integer ``v`` with
    ``max|v_i| <= search_bound``. The result is an upper estimate of the true
    minimum product distance; it is 0 as soon as a searched point has a zero
    coordinate.

    Args:
        basis: Lattice basis
        search_bound: Coefficient sup-norm bound (default 8 for d <= 4, else 3)

    Returns:
        float: Truncated minimum product distance
    """
    d = basis.dim
    bound = default_search_bound(d) if search_bound is None else search_bound
    if not isinstance(bound, (int, np.integer)) or bound < 1:
        raise DomainError(f"search_bound must be a positive integer, got {search_bound}")

    gen = basis.generator
    zero_tol = RANK_TOL * max(1.0, float(np.abs(gen).max()))
    span = np.arange(-bound, bound + 1)

    tail_len = d
    while tail_len > 1 and len(span) ** tail_len > _PRODUCT_CHUNK:
        tail_len -= 1
    head_len = d - tail_len
    tail = np.array(list(itertools.product(span, repeat=tail_len)), dtype=float)
    tail_points = tail @ gen[head_len:]
    tail_is_zero = ~tail.any(axis=1)

    best = math.inf
    for head in itertools.product(span, repeat=head_len):
        head_vec = np.array(head, dtype=float)
        points = tail_points + head_vec @ gen[:head_len] if head_len else tail_points
        magnitudes = np.abs(points)
        magnitudes[magnitudes <= zero_tol] = 0.0
        products = magnitudes.prod(axis=1)
        if not head_vec.any():
            products = products[~tail_is_zero]
        best = min(best, float(products.min()))
        if best == 0.0:
            break

    logger.debug("Truncated d_p,min at bound %d (d=%d): %.6g", bound, d, best)
    return best


def coding_gain(basis: LatticeBasis, budget: int = DEFAULT_NODE_BUDGET) -> float:
    """
    Coding gain ``eps_1^2 / det^(2/d)``; equals 1 for the cubic lattice.

    Raises:
        EnumerationBudgetError: If the shortest-vector enumeration exceeds the budget
    """
    eps1 = successive_minima(basis, 1, budget)
    return eps1 ** 2 / basis.volume ** (2.0 / basis.dim)
