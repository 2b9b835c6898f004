"""
Unitary precoder construction.

Type I precoders are re-optimized per channel with a single rotation angle,
Type II precoders are fixed full-diversity algebraic rotations, and X-code
precoders rotate strong/weak subchannel pairs by a constellation-specific angle.
"""

import dataclasses
import functools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .exceptions import (
    ContractViolationError,
    DimensionError,
    DomainError,
    InternalSearchError,
)
from .lattice import (
    DEFAULT_NODE_BUDGET,
    LatticeBasis,
    complex_to_real,
    default_search_bound,
    enumerate_short_vectors,
    gauss_reduce_batch,
    lll_reduce,
    min_product_distance,
)


logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-10
CONSTRAINT_TOL = 1e-9
TIE_RTOL = 1e-9
DEFAULT_THETA_STEP = 0.001

# 26.6 degrees in print; atan(1/2) exactly
XCODE_ANGLES_DEG = {
    4: math.degrees(math.atan(0.5)),
    16: 15.0,
    64: 8.0,
}


class PrecoderKind(str, Enum):
    IDENTITY = "identity"
    TYPE1 = "type1"
    TYPE2 = "type2"
    XCODE = "xcode"
    ROTATION = "rotation"


@dataclass(frozen=True, eq=False)
class Precoder:
    """Real orthogonal precoder with provenance metadata."""

    p: np.ndarray
    kind: PrecoderKind
    theta: Optional[float] = None
    label: str = ""
    dpmin_report: Optional[float] = None
    dpmin_raw: Optional[float] = None
    search_bound: Optional[int] = None
    objective: Optional[float] = None
    witness: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DimensionError(f"Precoder must be square, got shape {p.shape}")
        residual = np.abs(p @ p.T - np.eye(p.shape[0])).max()
        if residual > ORTHOGONALITY_TOL:
            raise ContractViolationError(f"Precoder is not orthogonal (residual {residual:.3e})")

        kind = PrecoderKind(self.kind)
        if kind is PrecoderKind.TYPE1:
            if self.theta is None or not -1e-12 <= self.theta <= math.pi / 4 + 1e-12:
                raise ContractViolationError(f"Type I angle must lie in [0, pi/4], got {self.theta}")

        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "kind", kind)

    @property
    def dim(self) -> int:
        return self.p.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "Precoder":
        return cls(np.eye(dim), PrecoderKind.IDENTITY, label=f"identity-{dim}")


def rotation_2d(theta: float) -> Precoder:
    """
    Plane rotation ``[[cos, sin], [-sin, cos]]``.

    Angles in [0, pi/4] are tagged as Type I; any other angle is a plain rotation.
    """
    if not np.isfinite(theta):
        raise DomainError(f"Rotation angle must be finite, got {theta}")
    c, s = math.cos(theta), math.sin(theta)
    kind = PrecoderKind.TYPE1 if 0.0 <= theta <= math.pi / 4 else PrecoderKind.ROTATION
    return Precoder(np.array([[c, s], [-s, c]]), kind, theta=float(theta), label=f"rotation({theta:.6f})")


# ---------------------------------------------------------------------
# Type I: channel-adapted angle search
# ---------------------------------------------------------------------

def type1_grid(step: float = DEFAULT_THETA_STEP) -> np.ndarray:
    """Search angles ``k * step`` that do not exceed pi/4."""
    if not 0 < step <= math.pi / 4:
        raise DomainError(f"Angle step must lie in (0, pi/4], got {step}")
    count = int(math.floor(math.pi / 4 / step + 1e-9)) + 1
    return np.arange(count) * step


def _check_search_inputs(sigma, rho) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float).ravel()
    if sigma.size != 2:
        raise DimensionError(f"Type I search works on two singular values, got {sigma.size}")
    if np.any(sigma < 0) or sigma[0] < sigma[1]:
        raise DomainError(f"Singular values must be nonnegative and sorted descending, got {sigma}")
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    return sigma


def _search_generators(sigma: np.ndarray, rho: float, thetas: np.ndarray) -> np.ndarray:
    """Row-convention generators of ``L^-1 P(theta)`` for each angle."""
    a, b = np.sqrt(1.0 + rho * sigma ** 2)
    c, s = np.cos(thetas), np.sin(thetas)
    gens = np.empty((thetas.size, 2, 2))
    # rows are the columns of diag(a, b) @ P(theta)
    gens[:, 0, 0] = a * c
    gens[:, 0, 1] = -b * s
    gens[:, 1, 0] = a * s
    gens[:, 1, 1] = b * c
    return gens


def _constrained_minimum(generator: np.ndarray, first_row, budget: int) -> Tuple[float, np.ndarray]:
    """Shortest vector of the lattice subject to ``[P v]_1 != 0``."""
    reduced, transforms = gauss_reduce_batch(generator[None])
    vector = transforms[0, 0]
    if abs(first_row @ vector) > CONSTRAINT_TOL:
        return float(reduced[0, 0] @ reduced[0, 0]), vector

    eps1 = math.sqrt(reduced[0, 0] @ reduced[0, 0])
    eps2 = math.sqrt(reduced[0, 1] @ reduced[0, 1])
    # any vector shorter than the second minimum is a multiple of the first,
    # so the search always terminates by that radius
    cap = max(8.0 * eps1, eps2)
    basis = LatticeBasis(generator)
    radius = 2.0 * eps1
    while True:
        radius = min(radius, cap)
        for rep in enumerate_short_vectors(basis, radius, budget):
            if abs(first_row @ rep.vector) > CONSTRAINT_TOL:
                return rep.norm_sq, rep.vector
        if radius >= cap:
            raise InternalSearchError("Type I constraint excludes every enumerated vector")
        radius *= 2.0


def type1_objective(sigma, rho: float, theta: float) -> Tuple[float, np.ndarray]:
    """
    Squared minimum distance of ``L^-1 P(theta)`` at a single angle, by Gauss reduction.

    Returns:
        tuple: (objective value, shortest integer vector v)
    """
    sigma = _check_search_inputs(sigma, rho)
    gen = _search_generators(sigma, rho, np.array([float(theta)]))
    reduced, transforms = gauss_reduce_batch(gen)
    return float(reduced[0, 0] @ reduced[0, 0]), transforms[0, 0]


def feasible_witness(
    sigma,
    rho: float,
    theta: float,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Tuple[float, np.ndarray]:
    """
    Shortest vector of ``L^-1 P(theta)`` whose image ``P(theta) v`` has a nonzero first coordinate.

    Falls back to radius-doubling enumeration when the Gauss-reduced shortest
    vector violates the constraint.

    Returns:
        tuple: (squared length, integer witness v)
    """
    sigma = _check_search_inputs(sigma, rho)
    gen = _search_generators(sigma, rho, np.array([float(theta)]))[0]
    first_row = np.array([math.cos(theta), math.sin(theta)])
    return _constrained_minimum(gen, first_row, budget)


def type1_search(
    sigma,
    rho: float,
    step: float = DEFAULT_THETA_STEP,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Precoder:
    """
    Grid search for the Type I rotation angle.

    Every angle of the grid is scored by the Gauss-reduced minimum distance of
    ``L^-1 P(theta)``; the largest wins, ties within a relative 1e-9 going to
    the larger angle. The stored witness is the shortest vector at the chosen
    angle with ``[P v]_1 != 0``.

    Args:
        sigma: The two singular values, sorted descending
        rho: Per-antenna SNR (positive)
        step: Grid step in radians
        budget: Enumeration budget for the witness fallback

    Returns:
        Precoder: 2×2 rotation at the best angle
    """
    sigma = _check_search_inputs(sigma, rho)
    thetas = type1_grid(step)
    gens = _search_generators(sigma, rho, thetas)

    reduced, _ = gauss_reduce_batch(gens)
    values = np.einsum("ij,ij->i", reduced[:, 0], reduced[:, 0])

    best = values.max()
    winner = int(np.flatnonzero(values >= best * (1.0 - TIE_RTOL))[-1])
    theta_star = float(thetas[winner])
    first_row = np.array([math.cos(theta_star), math.sin(theta_star)])
    _, witness = _constrained_minimum(gens[winner], first_row, budget)

    logger.debug(
        "Type I search: sigma=%s rho=%.4g theta*=%.3f objective=%.6g",
        sigma, rho, theta_star, values[winner],
    )

    rotation = rotation_2d(theta_star)
    return dataclasses.replace(
        rotation,
        kind=PrecoderKind.TYPE1,
        label=f"type1(theta={theta_star:.3f})",
        objective=float(values[winner]),
        witness=tuple(int(x) for x in witness),
    )


def lift_precoder(precoder: Precoder, n_complex: int) -> Precoder:
    """
    Lift a 2×2 real rotation to the 2n×2n real model.

    The rotation is applied identically to the real and the imaginary parts,
    i.e. the lifted matrix is ``complex_to_real(P)`` of the real 2×2 ``P``.
    """
    dim = 2 * n_complex
    if precoder.dim == dim:
        return precoder
    if precoder.dim == 2 and n_complex == 2:
        return dataclasses.replace(precoder, p=complex_to_real(precoder.p).real)
    raise DimensionError(f"Cannot lift a {precoder.dim}×{precoder.dim} precoder to {dim}×{dim}")


# ---------------------------------------------------------------------
# Type II: algebraic rotations
# ---------------------------------------------------------------------

def _cyclotomic_embedding(p: int):
    """Real embeddings of 2cos(2pi/p) and the trace-form twist (2 - x)/p."""
    k = np.arange(1, (p - 1) // 2 + 1)
    roots = 2.0 * np.cos(2.0 * np.pi * k / p)
    return roots, (2.0 - roots) / p


def _quartic_725_embedding():
    """Embeddings of x^4 - x^3 - 3x^2 + x + 1 and the twist (x^3 - x) / f'(x)."""
    coeffs = np.array([1.0, -1.0, -3.0, 1.0, 1.0])
    roots = np.sort(np.roots(coeffs).real)
    derivative = np.polyval(np.polyder(coeffs), roots)
    return roots, (roots ** 3 - roots) / derivative


# real_dim -> (field discriminant, embedding builder)
_ALGEBRAIC_FIELDS = {
    2: (5, lambda: _cyclotomic_embedding(5)),
    4: (725, _quartic_725_embedding),
    8: (17 ** 7, lambda: _cyclotomic_embedding(17)),
}


def _rotation_from_field(roots: np.ndarray, twist: np.ndarray) -> np.ndarray:
    """
    Orthogonal matrix whose rows are unit vectors of a twisted ideal lattice.

    The power basis embedded with weights ``sqrt(twist)`` spans a rotated copy of
    Z^d; its 2d unit vectors form the rotation.
    """
    d = roots.size
    if np.any(twist <= 0):
        raise InternalSearchError("Trace-form twist is not totally positive")

    embedded = np.vander(roots, d, increasing=True).T * np.sqrt(twist)
    gram = embedded @ embedded.T
    if not np.allclose(gram, np.rint(gram), atol=1e-7) or abs(np.linalg.det(gram) - 1.0) > 1e-6:
        raise InternalSearchError("Twisted trace form is not unimodular")

    reduced, _ = lll_reduce(LatticeBasis(embedded))
    units = enumerate_short_vectors(reduced, 1.0)
    if len(units) != d or any(abs(rep.norm_sq - 1.0) > 1e-8 for rep in units):
        raise InternalSearchError("Twisted trace form is not a rotated cubic lattice")

    rows = np.array([rep.vector @ reduced.generator for rep in units])
    # polar factor removes rounding drift
    u, _, vt = np.linalg.svd(rows)
    return u @ vt


@functools.lru_cache(maxsize=None)
def type2_rotation(real_dim: int, search_bound: Optional[int] = None) -> Precoder:
    """
    Fixed full-diversity rotation for the given real dimension.

    The rotation comes from a totally real number field (Q(sqrt 5) for d=2,
    the quartic field of discriminant 725 for d=4, Q(zeta_17)^+ for d=8).
    Its truncated minimum product distance is stored raw and normalized by
    the power 1/real_dim.

    Raises:
        DomainError: If real_dim is not 2, 4 or 8
    """
    if real_dim not in _ALGEBRAIC_FIELDS:
        raise DomainError(f"Type II rotations exist for real_dim in {sorted(_ALGEBRAIC_FIELDS)}, got {real_dim}")

    discriminant, embedding = _ALGEBRAIC_FIELDS[real_dim]
    rows = _rotation_from_field(*embedding())
    bound = default_search_bound(real_dim) if search_bound is None else search_bound
    dpmin = min_product_distance(LatticeBasis(rows), bound)
    report = dpmin ** (1.0 / real_dim)

    logger.debug("Type II rotation d=%d: d_p,min=%.6g normalized=%.6f (bound %d)", real_dim, dpmin, report, bound)

    # lattice points P v are the columns of P
    return Precoder(
        rows.T,
        PrecoderKind.TYPE2,
        label=f"type2(d={real_dim},disc={discriminant})",
        dpmin_report=report,
        dpmin_raw=dpmin,
        search_bound=bound,
    )


# ---------------------------------------------------------------------
# X-code baseline and factory
# ---------------------------------------------------------------------

def xcode_precoder(n: int, qam_order: int) -> Precoder:
    """
    X-code precoder: subchannel i is rotated together with subchannel n-i+1.

    Raises:
        DomainError: If qam_order is unsupported or n is not even
    """
    if qam_order not in XCODE_ANGLES_DEG:
        raise DomainError(f"X-code angles are defined for QAM orders {sorted(XCODE_ANGLES_DEG)}, got {qam_order}")
    if n < 2 or n % 2:
        raise DomainError(f"X-code pairing needs an even number of subchannels, got {n}")

    angle = math.radians(XCODE_ANGLES_DEG[qam_order])
    c, s = math.cos(angle), math.sin(angle)
    pairs = np.eye(n)
    for i in range(n // 2):
        j = n - 1 - i
        pairs[i, i], pairs[i, j] = c, s
        pairs[j, i], pairs[j, j] = -s, c

    return Precoder(
        complex_to_real(pairs).real,
        PrecoderKind.XCODE,
        theta=angle,
        label=f"xcode(n={n},qam={qam_order},angle={XCODE_ANGLES_DEG[qam_order]:.3f}deg)",
    )


def design_precoder(
    kind,
    sigma,
    rho: float,
    n_complex: int,
    qam_order: int,
    step: float = DEFAULT_THETA_STEP,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Precoder:
    """
    Precoder for one channel realization in the 2n×2n real model.

    Type I is searched on the given singular values; all other kinds ignore
    the channel.
    """
    kind = PrecoderKind(kind)
    dim = 2 * n_complex

    if kind is PrecoderKind.IDENTITY:
        return Precoder.identity(dim)
    if kind is PrecoderKind.TYPE2:
        return type2_rotation(dim)
    if kind is PrecoderKind.XCODE:
        return xcode_precoder(n_complex, qam_order)
    if kind is PrecoderKind.TYPE1:
        sigma = np.asarray(sigma, dtype=float).ravel()
        if n_complex == 1:
            search_sigma = np.repeat(sigma, 2)
        elif n_complex == 2:
            search_sigma = sigma
        else:
            raise DomainError(f"Type I search covers n_complex in (1, 2), got {n_complex}")
        return lift_precoder(type1_search(search_sigma, rho, step, budget), n_complex)

    raise DomainError(f"Precoder kind {kind.value} cannot be designed per channel")
