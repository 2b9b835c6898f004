"""
Tests for the integer-forcing receiver.
"""

import os
import sys

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from upif.channel import apply_channel, sample_channel, svd_sorted
from upif.codebook import sample_dither, sample_symbols, symbols_to_points
from upif.exceptions import ContractViolationError, DimensionError, DomainError
from upif.lattice import LatticeBasis, successive_minima
from upif.precoders import Precoder, design_precoder, rotation_2d, lift_precoder, type2_rotation, xcode_precoder
from upif.receiver import (
    IfSolution,
    build_effective_channel,
    compute_filter,
    decision_bias,
    if_decode,
    noise_energy,
    select_integer_matrix,
    solve_integer_forcing,
    theorem1_bound,
    woodbury_identity_gap,
)


SIGMA = np.array([1.7, 0.4])


class TestEffectiveChannel:
    """L and L_p."""

    def test_zero_snr(self):
        """rho = 0 gives L = I."""
        ec = build_effective_channel([1.0, 1.0], Precoder.identity(4), 0.0)
        np.testing.assert_allclose(ec.l, np.eye(4))
        np.testing.assert_allclose(ec.l_p, np.eye(4))

    def test_cholesky_relation(self):
        """L L^T = (I + rho Sigma_r^2)^-1 and L_p = P^T L."""
        p = type2_rotation(4)
        ec = build_effective_channel(SIGMA, p, 20.0)
        sr = np.diag([1.7, 0.4, 1.7, 0.4])
        np.testing.assert_allclose(ec.l @ ec.l.T, np.linalg.inv(np.eye(4) + 20.0 * sr @ sr), atol=1e-12)
        np.testing.assert_allclose(ec.l_p, p.p.T @ ec.l, atol=1e-12)
        assert ec.n_complex == 2

    def test_invalid(self):
        """Negative rho and mismatched precoders are rejected."""
        with pytest.raises(DomainError):
            build_effective_channel(SIGMA, Precoder.identity(4), -1.0)
        with pytest.raises(DimensionError):
            build_effective_channel(SIGMA, Precoder.identity(2), 1.0)

    def test_closed_form(self):
        """sigma = (2, 1), rho = 1 gives diag(1/sqrt5, 1/sqrt2) repeated."""
        ec = build_effective_channel([2.0, 1.0], Precoder.identity(4), 1.0)
        expected = np.diag([1 / np.sqrt(5), 1 / np.sqrt(2), 1 / np.sqrt(5), 1 / np.sqrt(2)])
        np.testing.assert_allclose(ec.l, expected, rtol=1e-14)


class TestIntegerForcing:
    """A, B and per-layer figures."""

    @pytest.fixture
    def ec(self):
        return build_effective_channel(SIGMA, type2_rotation(4), 50.0)

    def test_unimodular(self, ec):
        """A is integer with |det A| = 1."""
        a = select_integer_matrix(ec)
        assert a.dtype.kind == "i"
        assert abs(round(np.linalg.det(a.astype(float)))) == 1

    def test_layers_sorted(self, ec):
        """Layers come in increasing noise energy."""
        sol = solve_integer_forcing(ec)
        assert np.all(np.diff(sol.g_per_layer) >= -1e-12)
        np.testing.assert_allclose(sol.snr_eff, ec.rho / sol.g_per_layer)

    def test_best_layer_not_worse_than_identity(self, ec):
        """The first layer is at least as good as the best unit row."""
        sol = solve_integer_forcing(ec)
        identity_best = ec.rho * np.min(np.einsum("ij,ij->i", ec.l_p, ec.l_p))
        assert sol.g_per_layer[0] <= identity_best * (1.0 + 1e-12)

    def test_filter_formula(self, ec):
        """B = rho A M^T (I + rho M M^T)^-1."""
        a = select_integer_matrix(ec)
        m = ec.sigma_p
        expected = ec.rho * a @ m.T @ np.linalg.inv(np.eye(4) + ec.rho * m @ m.T)
        np.testing.assert_allclose(compute_filter(a, ec), expected, atol=1e-10)

    def test_noise_energy_matches_layer_figure(self, ec):
        """With the MMSE filter the layer noise equals rho ||a L_p||^2."""
        sol = solve_integer_forcing(ec)
        for m in range(4):
            assert noise_energy(sol.a[m], sol.b[m], ec) == pytest.approx(sol.g_per_layer[m], rel=1e-9)

    def test_requires_positive_snr(self):
        """Integer forcing is undefined at rho = 0."""
        ec = build_effective_channel(SIGMA, Precoder.identity(4), 0.0)
        with pytest.raises(DomainError):
            solve_integer_forcing(ec)

    def test_equal_singular_values_keep_identity(self):
        """A scaled orthogonal lattice keeps A a signed permutation."""
        ec = build_effective_channel([0.8, 0.8], Precoder.identity(4), 10.0)
        a = select_integer_matrix(ec)
        np.testing.assert_array_equal(np.abs(a).sum(axis=0), np.ones(4))
        np.testing.assert_array_equal(np.abs(a).sum(axis=1), np.ones(4))

    def test_best_layer_within_reduction_factor(self):
        """The first layer is within the LLL factor of the true minimum."""
        rng = np.random.default_rng(8)
        for _ in range(20):
            sigma = np.sort(rng.rayleigh(size=2))[::-1]
            ec = build_effective_channel(sigma, type2_rotation(4), 30.0)
            sol = solve_integer_forcing(ec)
            eps1 = successive_minima(LatticeBasis(ec.l_p), 1)
            assert sol.g_per_layer[0] <= 8.0 * ec.rho * eps1 ** 2 * (1 + 1e-9)

    def test_scalar_filter(self):
        """A = I, P = I and sigma = 1 give B = rho / (1 + rho) I."""
        ec = build_effective_channel([1.0], Precoder.identity(2), 3.0)
        np.testing.assert_allclose(compute_filter(np.eye(2, dtype=np.int64), ec), 0.75 * np.eye(2), atol=1e-14)

    def test_filter_vanishes_at_zero_snr(self):
        """rho = 0 gives B = 0."""
        ec = build_effective_channel(SIGMA, type2_rotation(4), 0.0)
        np.testing.assert_array_equal(compute_filter(np.eye(4, dtype=np.int64), ec), np.zeros((4, 4)))

    def test_noise_energy_direct(self):
        """b = 0 leaves rho ||a||^2."""
        ec = build_effective_channel(SIGMA, type2_rotation(4), 7.0)
        assert noise_energy(np.eye(4)[0], np.zeros(4), ec) == pytest.approx(7.0)

    def test_unit_rows_without_precoding(self):
        """With P = I and a = e_m the layer SNR is 1 + rho sigma_m^2."""
        rho = 12.0
        ec = build_effective_channel(SIGMA, Precoder.identity(4), rho)
        a = np.eye(4, dtype=np.int64)
        b = compute_filter(a, ec)
        for m, s in enumerate([1.7, 0.4, 1.7, 0.4]):
            energy = noise_energy(a[m], b[m], ec)
            assert energy == pytest.approx(rho / (1 + rho * s ** 2), rel=1e-12)
            assert rho / energy == pytest.approx(1 + rho * s ** 2, rel=1e-12)

    def test_filter_is_stationary(self, ec):
        """Perturbing B never lowers the layer noise energy."""
        sol = solve_integer_forcing(ec)
        rng = np.random.default_rng(9)
        for m in range(4):
            base = noise_energy(sol.a[m], sol.b[m], ec)
            for _ in range(10):
                delta = rng.standard_normal(4)
                delta /= np.linalg.norm(delta)
                for t in (1e-3, -1e-3):
                    assert noise_energy(sol.a[m], sol.b[m] + t * delta, ec) >= base * (1 - 1e-12)

    @staticmethod
    def check_layer_identity(count, seed):
        cases = [(2, kind) for kind in KINDS] + [(4, kind) for kind in KINDS if kind != "type1"]
        rng = np.random.default_rng(seed)
        for trial in range(count):
            n, kind = cases[trial % len(cases)]
            sigma = svd_sorted(sample_channel(n, rng)).sigma
            rho = 10 ** rng.uniform(-1, 3)
            ec = build_effective_channel(sigma, design_precoder(kind, sigma, rho, n, 16), rho)
            sol = solve_integer_forcing(ec)
            for m in range(2 * n):
                assert noise_energy(sol.a[m], sol.b[m], ec) == pytest.approx(sol.g_per_layer[m], rel=1e-9)

    def test_layer_identity_random(self):
        """noise_energy with the MMSE filter equals rho ||a L_p||^2 for every precoder kind."""
        self.check_layer_identity(140, seed=10)

    @pytest.mark.slow
    def test_layer_identity_at_scale(self):
        """Same identity over 10^4 random (channel, precoder, rho) triples."""
        self.check_layer_identity(10 ** 4, seed=100)


class TestDecoding:
    """if_decode round trips."""

    @pytest.mark.parametrize("precoder", [
        Precoder.identity(4),
        type2_rotation(4),
        xcode_precoder(2, 16),
        lift_precoder(rotation_2d(0.5), 2),
    ], ids=["identity", "type2", "xcode", "type1"])
    def test_noiseless_round_trip(self, precoder):
        """At high SNR without noise every symbol is recovered."""
        rho, g = 1e8, 4
        symbols = sample_symbols(2, g, np.random.default_rng(0))
        y = apply_channel(symbols_to_points(symbols, g), SIGMA, precoder, rho)
        sol = solve_integer_forcing(build_effective_channel(SIGMA, precoder, rho))
        np.testing.assert_array_equal(if_decode(y, sol, rho, g), symbols)

    def test_dithered_round_trip(self):
        """Subtracting A u and reducing mod g recovers dithered symbols."""
        rho, g = 1e8, 8
        rng = np.random.default_rng(1)
        symbols = sample_symbols(2, g, rng)
        dither = sample_dither(2, rng)
        precoder = type2_rotation(4)
        y = apply_channel(symbols_to_points(symbols, g, dither), SIGMA, precoder, rho)
        sol = solve_integer_forcing(build_effective_channel(SIGMA, precoder, rho))
        np.testing.assert_array_equal(if_decode(y, sol, rho, g, dither), symbols)

    def test_not_unimodular(self):
        """A non-unimodular A is a contract violation."""
        sol = IfSolution(a=2 * np.eye(4, dtype=np.int64), b=np.eye(4), g_per_layer=np.ones(4), snr_eff=np.ones(4))
        with pytest.raises(ContractViolationError):
            if_decode(np.zeros((4, 4)), sol, 1.0, 2)

    def test_zero_forcing_filter_gives_same_symbols(self):
        """At zero noise B = A (Sigma_r P)^-1 decodes identically."""
        rho, g = 5.0, 4
        precoder = type2_rotation(4)
        ec = build_effective_channel(SIGMA, precoder, rho)
        sol = solve_integer_forcing(ec)
        zf = IfSolution(a=sol.a, b=sol.a @ np.linalg.inv(ec.sigma_p), g_per_layer=sol.g_per_layer,
                        snr_eff=sol.snr_eff)
        symbols = sample_symbols(2, g, np.random.default_rng(3))
        y = apply_channel(symbols_to_points(symbols, g), SIGMA, precoder, rho)
        np.testing.assert_array_equal(if_decode(y, zf, rho, g), symbols)

    def test_very_low_snr_stays_in_range(self):
        """Heavy noise still yields symbols in 0..g-1."""
        rho, g = 1e-6, 8
        rng = np.random.default_rng(4)
        precoder = type2_rotation(4)
        symbols = sample_symbols(2, g, rng)
        y = apply_channel(symbols_to_points(symbols, g), SIGMA, precoder, rho, rng)
        sol = solve_integer_forcing(build_effective_channel(SIGMA, precoder, rho))
        decoded = if_decode(y, sol, rho, g)
        assert decoded.shape == (4, 4)
        assert decoded.min() >= 0 and decoded.max() < g


KINDS = ["identity", "type1", "type2", "xcode"]


def noiseless_if_round_trips(kind, g, trials, rho=1e8, seed=0):
    """(trials inside the exact-decision regime, mismatches among them)."""
    rng = np.random.default_rng(seed)
    inside = mismatches = 0
    for _ in range(trials):
        sigma = svd_sorted(sample_channel(2, rng)).sigma
        precoder = design_precoder(kind, sigma, rho, 2, g * g)
        ec = build_effective_channel(sigma, precoder, rho)
        sol = solve_integer_forcing(ec)
        if decision_bias(sol, ec, g) >= 0.5:
            continue
        inside += 1
        symbols = sample_symbols(2, g, rng)
        y = apply_channel(symbols_to_points(symbols, g), sigma, precoder, rho)
        mismatches += int(not np.array_equal(if_decode(y, sol, rho, g), symbols))
    return inside, mismatches


class TestNoiselessRegime:
    """Exactness of noiseless IF decoding inside the small-bias regime."""

    @pytest.mark.parametrize("g", [2, 4, 8])
    @pytest.mark.parametrize("kind", KINDS)
    def test_round_trip(self, kind, g):
        """High-SNR noiseless blocks decode exactly for every precoder kind."""
        inside, mismatches = noiseless_if_round_trips(kind, g, 40)
        assert mismatches == 0
        assert inside >= 39

    @pytest.mark.slow
    @pytest.mark.parametrize("g", [2, 4, 8])
    @pytest.mark.parametrize("kind", KINDS)
    def test_round_trip_at_scale(self, kind, g):
        """10^3 random channels per kind and alphabet, no mismatch."""
        inside, mismatches = noiseless_if_round_trips(kind, g, 1000, seed=g)
        assert mismatches == 0
        assert inside >= 990

    def test_bias_at_low_and_high_snr(self):
        """The noiseless offset exceeds half a step at low rho and vanishes at high rho."""
        precoder = type2_rotation(4)
        biases = [
            decision_bias(solve_integer_forcing(build_effective_channel(SIGMA, precoder, rho)),
                          build_effective_channel(SIGMA, precoder, rho), 8)
            for rho in (0.5, 1e6)
        ]
        assert biases[0] > 0.5
        assert biases[-1] < 1e-3


class TestBounds:
    """Layer error bound and the push-through identity."""

    def test_bound_monotone_in_layer(self):
        """Later layers have weaker bounds, all in (0, 1]."""
        ec = build_effective_channel(SIGMA, type2_rotation(4), 100.0)
        bounds = [theorem1_bound(ec, m) for m in range(1, 5)]
        assert all(0.0 < b <= 1.0 for b in bounds)
        assert all(x <= y + 1e-15 for x, y in zip(bounds, bounds[1:]))
        with pytest.raises(DomainError):
            theorem1_bound(ec, 5)

    def test_woodbury(self):
        """I - M1 (I + M2 M1)^-1 M2 = (I + M1 M2)^-1."""
        rng = np.random.default_rng(2)
        m1 = rng.standard_normal((4, 3))
        m2 = rng.standard_normal((3, 4))
        assert woodbury_identity_gap(m1, m2) < 1e-10

    def test_constant_for_single_antenna(self):
        """2n = 2 uses c = 1/68 on the second dual minimum."""
        ec = build_effective_channel([1.3], lift_precoder(rotation_2d(0.3), 1), 4.0)
        eps = successive_minima(LatticeBasis.from_columns(np.linalg.inv(ec.l_p)), 2)
        assert theorem1_bound(ec, 1) == pytest.approx(np.exp(-eps ** 2 / 68.0), rel=1e-12)

    def test_bound_monotone_in_snr(self):
        """A fixed channel's bound does not grow with rho."""
        precoder = type2_rotation(4)
        bounds = [theorem1_bound(build_effective_channel(SIGMA, precoder, rho), 1)
                  for rho in (0.1, 1.0, 10.0, 100.0, 1000.0)]
        assert all(x >= y * (1 - 1e-12) for x, y in zip(bounds, bounds[1:]))
        assert bounds[-1] < bounds[0]

    def test_woodbury_random_pairs(self):
        """The identity holds for many random well-conditioned pairs."""
        rng = np.random.default_rng(11)
        for _ in range(1000):
            d, k = rng.integers(1, 9, size=2)
            m1 = 0.5 * rng.standard_normal((d, k))
            m2 = 0.5 * rng.standard_normal((k, d))
            if np.linalg.cond(np.eye(d) + m1 @ m2) > 1e3:
                continue
            assert woodbury_identity_gap(m1, m2) <= 1e-8


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
