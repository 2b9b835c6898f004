"""
Tests for the box-constrained sphere decoder and codeword ML decoding.
"""

import itertools
import os
import sys

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from upif.channel import apply_channel, real_sigma, sample_channel, svd_sorted
from upif.codebook import sample_symbols, symbols_to_points
from upif.exceptions import DimensionError, DomainError
from upif.ml import (
    FiniteCodebookLattice,
    _independent_blocks,
    ml_decode,
    sphere_decode,
    sphere_decode_with_stats,
)
from upif.precoders import Precoder, design_precoder, type2_rotation, xcode_precoder


def brute_force(y, generator, low, high):
    """Exhaustive closest point with lexicographic tie-break."""
    best, best_dist = None, np.inf
    for s in itertools.product(range(low, high + 1), repeat=generator.shape[0]):
        r = y - np.array(s) @ generator
        dist = r @ r
        if dist < best_dist - 1e-12:
            best, best_dist = np.array(s), dist
    return best


class TestSphereDecoder:
    """Closest codebook point."""

    def test_cubic_rounding_and_clipping(self):
        """For Z^2 the decoder rounds and clips to the box."""
        lat = FiniteCodebookLattice(np.eye(2), (0, 3))
        np.testing.assert_array_equal(sphere_decode([0.4, 2.6], lat), [0, 3])
        np.testing.assert_array_equal(sphere_decode([-5.0, 10.0], lat), [0, 3])

    def test_ties_are_lexicographic(self):
        """Equidistant candidates resolve to the smallest symbol vector."""
        lat = FiniteCodebookLattice(np.eye(2), (0, 1))
        np.testing.assert_array_equal(sphere_decode([0.5, 0.5], lat), [0, 0])

    def test_against_brute_force(self):
        """Matches exhaustive search on random 3D codebooks."""
        rng = np.random.default_rng(0)
        for _ in range(30):
            gen = rng.standard_normal((3, 3))
            lat = FiniteCodebookLattice(gen, (0, 3))
            y = rng.uniform(-1, 4, 3) @ gen + 0.3 * rng.standard_normal(3)
            s, visited = sphere_decode_with_stats(y, lat)
            np.testing.assert_array_equal(s, brute_force(y, gen, 0, 3))
            assert 1 <= visited <= lat.codebook_size

    def test_invalid(self):
        """Wrong lengths and empty boxes are rejected."""
        lat = FiniteCodebookLattice(np.eye(2), (0, 1))
        with pytest.raises(DimensionError):
            sphere_decode([0.0, 0.0, 0.0], lat)
        with pytest.raises(DomainError):
            FiniteCodebookLattice(np.eye(2), (2, 1))

    @staticmethod
    def check_four_dimensional(g, count, seed):
        rng = np.random.default_rng(seed)
        for _ in range(count):
            gen = rng.standard_normal((4, 4))
            lat = FiniteCodebookLattice(gen, (0, g - 1))
            y = rng.uniform(-0.5, g - 0.5, 4) @ gen + 0.5 * rng.standard_normal(4)
            s, visited = sphere_decode_with_stats(y, lat)
            np.testing.assert_array_equal(s, brute_force(y, gen, 0, g - 1))
            assert visited <= lat.codebook_size

    @pytest.mark.parametrize("g", [2, 4])
    def test_four_dimensional_exhaustive(self, g):
        """d = 4 agrees with full codebook enumeration."""
        self.check_four_dimensional(g, 40, seed=g)

    @pytest.mark.slow
    @pytest.mark.parametrize("g", [2, 4])
    def test_four_dimensional_exhaustive_at_scale(self, g):
        """Same agreement on 1000 instances."""
        self.check_four_dimensional(g, 1000, seed=10 + g)

    def test_far_outside_gives_corner(self):
        """A point far beyond the hull decodes to a corner of the box."""
        gen = type2_rotation(4).p
        lat = FiniteCodebookLattice(gen, (0, 3))
        y = 1e3 * np.ones(4) @ gen
        s = sphere_decode(y, lat)
        np.testing.assert_array_equal(s, brute_force(y, gen, 0, 3))
        assert set(s.tolist()) <= {0, 3}

    def test_exact_point(self):
        """A codebook point decodes to itself."""
        gen = type2_rotation(4).p
        lat = FiniteCodebookLattice(gen, (0, 1))
        np.testing.assert_array_equal(sphere_decode(np.array([1, 0, 1, 1]) @ gen, lat), [1, 0, 1, 1])


class TestMLDecode:
    """Codeword-level ML decoding."""

    def test_xcode_blocks(self):
        """An X-code channel splits into the rotated pairs."""
        channel = real_sigma([1.5, 0.5])[:, None] * xcode_precoder(2, 4).p
        blocks = _independent_blocks(channel)
        assert [list(b) for b in blocks] == [[0, 1], [2, 3]]
        assert len(_independent_blocks(np.eye(4))) == 4

    @pytest.mark.parametrize("g", [2, 4, 8])
    @pytest.mark.parametrize("kind", ["identity", "type1", "type2", "xcode"])
    def test_noiseless_round_trip(self, kind, g):
        """Without noise ML decoding is exact at any SNR."""
        rng = np.random.default_rng(g)
        for rho in (0.5, 10.0, 1e4):
            sigma = svd_sorted(sample_channel(2, rng)).sigma
            precoder = design_precoder(kind, sigma, rho, 2, g * g)
            symbols = sample_symbols(2, g, rng)
            y = apply_channel(symbols_to_points(symbols, g), sigma, precoder, rho)
            np.testing.assert_array_equal(ml_decode(y, sigma, precoder, rho, g), symbols)

    def test_invalid_rho(self):
        """rho must be positive."""
        with pytest.raises(DomainError):
            ml_decode(np.zeros((4, 4)), [1.0, 1.0], Precoder.identity(4), 0.0, 2)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
