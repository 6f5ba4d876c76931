"""Phase-space evolution of the planar rotor: states, propagators, kernels."""

import math

import numpy as np
import pytest
from scipy.special import iv

from oracles import bessel_series, rk4_master_equation, wigner_single_window
from rotodiff.planar import (
    GridTruncationError,
    PlanarKernel,
    PlanarParams,
    PlanarWignerState,
    build_kernel,
    coherence_contrast,
    evolve_analytic,
    evolve_numeric,
    ground_state,
    interference_mass,
    kernel_value,
    l1_distance,
    marginal_alpha,
    marginal_overlap,
    mean_energy,
    modified_bessel_I,
    momentum_distribution,
    packet_retention,
    packet_superposition,
    plane_wave,
    plane_wave_superposition,
    wigner_from_wavefunction,
)

TWO_PI = 2.0 * math.pi


def packet_state(n_alpha=512, sigma=0.06, m_max=128) -> PlanarWignerState:
    return wigner_from_wavefunction(packet_superposition(n_alpha, sigma), m_max)


class TestModifiedBessel:
    def test_matches_power_series_oracle(self):
        for order in range(7):
            for x in (0.0, 0.05, 0.3, 1.0, 4.0, 9.5):
                assert modified_bessel_I(order, x) == pytest.approx(
                    bessel_series(order, x, terms=40), rel=1e-12, abs=1e-300
                )

    def test_frozen_reference_point(self):
        assert modified_bessel_I(0, 1.0) == pytest.approx(
            1.2660658777520084, rel=1e-14
        )

    def test_scaled_variant_safe_at_large_argument(self):
        scaled = modified_bessel_I(3, 800.0, scaled=True)
        assert 0.0 < scaled < 1.0
        # e^{-x} I_3(x) ~ 1/sqrt(2 pi x) for large x
        assert scaled == pytest.approx(1.0 / math.sqrt(TWO_PI * 800.0), rel=1e-2)

    def test_overflow_guard(self):
        with pytest.raises(ValueError):
            modified_bessel_I(0, 800.0)

    def test_integer_order_symmetry(self):
        assert modified_bessel_I(-2, 0.8) == pytest.approx(
            modified_bessel_I(2, 0.8), rel=1e-15
        )

    def test_vector_argument(self):
        x = np.array([0.1, 1.0, 3.0])
        out = modified_bessel_I(1, x)
        for xi, oi in zip(x, out):
            assert oi == pytest.approx(bessel_series(1, float(xi)), rel=1e-12)


class TestStateContainer:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            PlanarWignerState(values=np.zeros((100, 5)))  # not a power of two
        with pytest.raises(ValueError):
            PlanarWignerState(values=np.zeros((64, 4)))  # even momentum count
        with pytest.raises(ValueError):
            PlanarWignerState(values=np.zeros(64))

    def test_grid_properties(self):
        state = ground_state(n_alpha=64, m_max=5)
        assert state.n_alpha == 64
        assert state.m_max == 5
        assert state.d_alpha == pytest.approx(TWO_PI / 64, rel=1e-15)
        np.testing.assert_array_equal(state.m_values, np.arange(-5, 6))
        assert state.alpha[1] == pytest.approx(TWO_PI / 64, rel=1e-15)

    def test_ground_state_is_normalized_momentum_point_mass(self):
        state = ground_state(n_alpha=128, m_max=16)
        assert state.total_mass() == pytest.approx(1.0, abs=1e-15)
        p = momentum_distribution(state)
        assert p[state.m_max] == pytest.approx(1.0, abs=1e-15)
        assert np.all(np.delete(p, state.m_max) == 0.0)
        assert mean_energy(state, PlanarParams(inertia=1.0, d1=0.0)) == 0.0
        assert state.edge_mass_fraction() == 0.0

    def test_params_validation(self):
        with pytest.raises(ValueError):
            PlanarParams(inertia=0.0, d1=1.0)
        with pytest.raises(ValueError):
            PlanarParams(inertia=1.0, d1=-0.1)
        with pytest.raises(ValueError):
            PlanarParams(inertia=1.0, d1=0.0, d2=-0.1)
        with pytest.raises(ValueError):
            PlanarParams(inertia=1.0, d1=0.0, hbar=0.0)


class TestWignerTransform:
    def test_plane_wave_occupies_single_momentum_row(self):
        for k in (-3, 0, 5):
            state = wigner_from_wavefunction(plane_wave(k, n_alpha=64), m_max=8)
            expected = np.zeros((64, 17))
            expected[:, 8 + k] = 1.0 / TWO_PI
            np.testing.assert_allclose(state.values, expected, atol=1e-15)

    def test_input_normalization_is_irrelevant(self):
        psi = packet_superposition(n_alpha=128, sigma=0.2)
        state = wigner_from_wavefunction(psi, m_max=16)
        rescaled = wigner_from_wavefunction(2.7 * psi, m_max=16)
        np.testing.assert_allclose(rescaled.values, state.values, atol=1e-14)

    def test_matches_direct_angle_difference_sum(self):
        psi = packet_superposition(n_alpha=128, sigma=0.25)
        state = wigner_from_wavefunction(psi, m_max=24)
        direct = wigner_single_window(psi, 24)
        direct /= direct.sum() * (TWO_PI / 128)
        np.testing.assert_allclose(state.values, direct, atol=1e-13)

    def test_angular_marginal_is_wavefunction_density(self):
        psi = packet_superposition(n_alpha=512, sigma=0.06)
        state = wigner_from_wavefunction(psi, m_max=128)
        np.testing.assert_allclose(
            marginal_alpha(state), np.abs(psi) ** 2, atol=1e-13
        )

    def test_two_packet_fringes_alternate_sign_between_the_packets(self):
        state = packet_state()
        center_row = state.values[0, :]  # alpha = 0 sits between the packets
        c = state.m_max
        for m in range(-6, 7):
            assert center_row[c + m] * (-1.0) ** m > 0.0

    def test_superposition_coefficients_weight_momentum_rows(self):
        psi = plane_wave_superposition({2: 1.0, -2: 1.0}, n_alpha=64)
        state = wigner_from_wavefunction(psi, m_max=8)
        p = momentum_distribution(state)
        assert p[8 + 2] == pytest.approx(0.5, abs=1e-12)
        assert p[8 - 2] == pytest.approx(0.5, abs=1e-12)
        # equal-weight interference midway alternates with alpha, not m
        assert abs(state.values[:, 8].max()) > 0.1

    def test_rejects_non_vector_input(self):
        with pytest.raises(ValueError):
            wigner_from_wavefunction(np.ones((4, 4), dtype=complex), m_max=2)


class TestNumericEvolution:
    def test_free_evolution_step_count_is_irrelevant(self):
        params = PlanarParams(inertia=1.0, d1=0.0)
        state = packet_state(n_alpha=128, sigma=0.2, m_max=24)
        coarse = evolve_numeric(state, params, 0.37, n_steps=1)
        fine = evolve_numeric(state, params, 0.37, n_steps=137)
        np.testing.assert_allclose(coarse.values, fine.values, atol=1e-13)

    def test_free_revival_at_full_period(self):
        params = PlanarParams(inertia=1.0, d1=0.0)
        state = packet_state(n_alpha=256, sigma=0.1, m_max=64)
        revived = evolve_numeric(state, params, TWO_PI, n_steps=64)
        assert l1_distance(revived, state) < 1e-9

    def test_half_turn_symmetric_state_revives_at_half_period(self):
        params = PlanarParams(inertia=1.0, d1=0.0)
        state = packet_state(n_alpha=256, sigma=0.1, m_max=64)
        revived = evolve_numeric(state, params, math.pi, n_steps=64)
        assert l1_distance(revived, state) < 1e-9

    def test_ground_state_momentum_spread_matches_closed_form(self):
        params = PlanarParams(inertia=1.0, d1=0.5)
        state = evolve_numeric(ground_state(128, 32), params, 1.0, n_steps=50)
        p = momentum_distribution(state)
        tau = 0.5
        for m in range(-6, 7):
            expected = math.exp(-2.0 * tau) * bessel_series(abs(m), 2.0 * tau)
            assert p[32 + m] == pytest.approx(expected, abs=1e-10)

    def test_mass_conserved_over_a_thousand_steps(self):
        params = PlanarParams(inertia=1.0, d1=0.8, d2=0.4)
        state = evolve_numeric(packet_state(128, 0.2, 24), params, 0.5, n_steps=1000)
        assert state.total_mass() == pytest.approx(1.0, abs=1e-9)

    def test_energy_grows_at_combined_channel_rate(self):
        params = PlanarParams(inertia=2.0, d1=0.7, d2=0.5)
        state = evolve_numeric(ground_state(64, 48), params, 0.8, n_steps=100)
        expected = (0.7 + 0.5) * 0.8 / 2.0
        assert mean_energy(state, params) == pytest.approx(expected, rel=1e-6)

    def test_half_turn_symmetry_is_exactly_preserved(self):
        params = PlanarParams(inertia=1.0, d1=3.0, d2=1.0)
        state = evolve_numeric(packet_state(), params, 0.11, n_steps=40)
        half = state.n_alpha // 2
        np.testing.assert_allclose(
            state.values, np.roll(state.values, half, axis=0), atol=1e-15
        )

    def test_splitting_error_scales_quadratically_in_step_size(self):
        params = PlanarParams(inertia=1.0, d1=10.0)
        state = packet_state()
        t = 0.1 * math.pi / 10.0
        reference = evolve_numeric(state, params, t, n_steps=3200)
        coarse = l1_distance(evolve_numeric(state, params, t, n_steps=100), reference)
        fine = l1_distance(evolve_numeric(state, params, t, n_steps=400), reference)
        assert coarse == pytest.approx(7.9e-7, rel=0.3)
        assert coarse / fine > 8.0

    def test_momentum_window_truncation_aborts(self):
        params = PlanarParams(inertia=1.0, d1=5.0)
        with pytest.raises(GridTruncationError):
            evolve_numeric(ground_state(32, 8), params, 2.0, n_steps=200)

    def test_time_accumulates_and_zero_duration_copies(self):
        params = PlanarParams(inertia=1.0, d1=0.1)
        state = ground_state(64, 16)
        once = evolve_numeric(state, params, 0.25, n_steps=10)
        again = evolve_numeric(once, params, 0.25, n_steps=10)
        assert again.time == pytest.approx(0.5)
        frozen = evolve_numeric(once, params, 0.0, n_steps=10)
        np.testing.assert_array_equal(frozen.values, once.values)
        assert frozen.values is not once.values

    def test_argument_validation(self):
        params = PlanarParams(inertia=1.0, d1=0.1)
        state = ground_state(64, 16)
        with pytest.raises(ValueError):
            evolve_numeric(state, params, -1.0, n_steps=10)
        with pytest.raises(ValueError):
            evolve_numeric(state, params, 1.0, n_steps=0)
        with pytest.raises(ValueError):
            evolve_numeric(state, params, 1.0, n_steps=10, check_every=0)


class TestClosedFormEvolution:
    def test_requires_single_channel(self):
        params = PlanarParams(inertia=1.0, d1=1.0, d2=0.5)
        with pytest.raises(ValueError):
            evolve_analytic(ground_state(64, 16), params, 1.0)

    def test_ground_state_momentum_distribution(self):
        params = PlanarParams(inertia=1.0, d1=1.0)
        state = evolve_analytic(ground_state(512, 128), params, 0.5)
        p = momentum_distribution(state)
        for m in range(-8, 9):
            expected = math.exp(-1.0) * bessel_series(abs(m), 1.0)
            assert p[128 + m] == pytest.approx(expected, abs=1e-12)

    def test_energy_law_is_exact(self):
        params = PlanarParams(inertia=3.0, d1=2.5)
        state = evolve_analytic(ground_state(256, 96), params, 0.9)
        assert mean_energy(state, params) == pytest.approx(2.5 * 0.9 / 3.0, rel=1e-12)

    def test_agrees_with_numeric_propagator_on_sheared_state(self):
        params = PlanarParams(inertia=1.0, d1=10.0)
        state = packet_state()
        t = 0.1 * math.pi / 10.0
        spectral = evolve_analytic(state, params, t)
        stepped = evolve_numeric(state, params, t, n_steps=1600)
        assert l1_distance(spectral, stepped) < 1e-7

    def test_free_limit_reduces_to_pure_shear(self):
        params = PlanarParams(inertia=1.0, d1=0.0)
        state = packet_state(n_alpha=128, sigma=0.2, m_max=24)
        np.testing.assert_allclose(
            evolve_analytic(state, params, 0.4).values,
            evolve_numeric(state, params, 0.4, n_steps=1).values,
            atol=1e-12,
        )

    def test_truncation_error_raised_on_narrow_window(self):
        params = PlanarParams(inertia=1.0, d1=5.0)
        with pytest.raises(GridTruncationError):
            evolve_analytic(ground_state(32, 8), params, 2.0)


class TestDenseOracle:
    def test_split_propagator_matches_rk4_on_both_channels(self):
        params = PlanarParams(inertia=1.0, d1=0.4, d2=0.3)
        state = packet_state(n_alpha=64, sigma=0.25, m_max=16)
        split = evolve_numeric(state, params, 0.5, n_steps=400)
        dense = rk4_master_equation(state.values, 1.0, 0.4, 0.3, 1.0, 0.5, 400)
        assert np.abs(split.values - dense).sum() * state.d_alpha < 1e-5


class TestKernelTable:
    def test_normalization(self):
        params = PlanarParams(inertia=1.0, d1=1.0)
        kernel = build_kernel(params, 0.7, n_alpha=256)
        assert isinstance(kernel, PlanarKernel)
        assert kernel.normalization == pytest.approx(1.0, abs=1e-9)

    def test_momentum_marginal_reproduces_closed_form(self):
        params = PlanarParams(inertia=1.0, d1=1.0)
        kernel = build_kernel(params, 0.7, n_alpha=256)
        d_alpha = TWO_PI / kernel.n_alpha
        tau = 0.7
        for ell in range(-3, 4):
            column = kernel.table[:, kernel.ell_max + ell].sum() * d_alpha
            expected = math.exp(-2.0 * tau) * bessel_series(abs(ell), 2.0 * tau)
            assert column == pytest.approx(expected, abs=1e-12)

    def test_pointwise_series_against_brute_force_sum(self):
        params = PlanarParams(inertia=1.0, d1=1.0)
        t = 0.7
        tau = params.d1 * t
        for ell in (1, 2):
            for alpha in (0.0, 0.9, 2.5):
                total = 0.5 * math.exp(-2.0 * tau) * iv(ell, 2.0 * tau)
                for k in range(1, 4001):
                    phi = 0.5 * k * t
                    z = 2.0 * tau * math.sin(phi) / phi
                    total += (
                        math.exp(-2.0 * tau)
                        * iv(ell, z)
                        * math.cos(k * alpha + ell * phi)
                    )
                assert kernel_value(
                    alpha, ell, params, t, k_max=4000, tol=0.0
                ) == pytest.approx(total / math.pi, rel=1e-10, abs=1e-12)

    def test_requires_single_channel_and_positive_time(self):
        with pytest.raises(ValueError):
            build_kernel(PlanarParams(inertia=1.0, d1=1.0, d2=0.1), 0.5)
        with pytest.raises(ValueError):
            build_kernel(PlanarParams(inertia=1.0, d1=1.0), 0.0)
        with pytest.raises(ValueError):
            kernel_value(0.0, 1, PlanarParams(inertia=1.0, d1=1.0, d2=0.1), 0.5)


class TestDiagnostics:
    def test_interference_mass_frozen_for_reference_packet(self):
        assert interference_mass(packet_state()) == pytest.approx(
            0.4984091434925306, rel=1e-9
        )

    def test_contrast_is_one_at_start_and_decays(self):
        params = PlanarParams(inertia=1.0, d1=10.0)
        state = packet_state()
        assert coherence_contrast(state, state) == pytest.approx(1.0, abs=1e-12)
        previous = 1.0
        for steps in (1, 2, 4):
            evolved = evolve_numeric(state, params, steps * 0.02, n_steps=40 * steps)
            current = coherence_contrast(evolved, state)
            assert current < previous
            previous = current

    def test_contrast_requires_fringes_in_the_initial_state(self):
        values = np.zeros((64, 17))
        values[30:35, :] = 64.0 / (TWO_PI * 5 * 17)  # nothing near alpha = 0
        flat = PlanarWignerState(values=values)
        with pytest.raises(ValueError):
            coherence_contrast(flat, flat)

    def test_interference_band_must_contain_grid_angles(self):
        with pytest.raises(ValueError):
            interference_mass(packet_state(), band_halfwidth=0.0)

    def test_l1_distance_basic_properties(self):
        state = packet_state(128, 0.2, 24)
        other = ground_state(128, 24)
        assert l1_distance(state, state) == 0.0
        assert l1_distance(state, other) == pytest.approx(
            l1_distance(other, state), rel=1e-15
        )
        with pytest.raises(ValueError):
            l1_distance(state, ground_state(64, 24))

    def test_marginal_overlap_of_state_with_itself_is_total_mass(self):
        state = packet_state(128, 0.2, 24)
        assert marginal_overlap(state, state) == pytest.approx(1.0, abs=1e-12)

    def test_packet_retention_full_at_start_and_after_free_motion(self):
        state = packet_state()
        assert packet_retention(state, state) == pytest.approx(1.0, abs=1e-12)
        free = evolve_numeric(
            state, PlanarParams(inertia=1.0, d1=0.0), 0.05 * math.pi, n_steps=64
        )
        assert packet_retention(free, state) > 0.9

    def test_packet_retention_needs_mass_in_every_window(self):
        values = np.zeros((64, 17))
        values[32, 8] = 64.0 / TWO_PI  # all mass at alpha = pi
        state = PlanarWignerState(values=values)
        with pytest.raises(ValueError):
            packet_retention(state, state, centers=(0.0,), halfwidth=0.1)
