"""Collision-level input: form factors, Born amplitudes, environment rates."""

import math

import numpy as np
import pytest
from scipy import constants
from scipy.special import spherical_jn

from oracles import trapezoid_form_factor
from rotodiff.localization import AnisotropySpec, diffusion_constants
from rotodiff.scattering import (
    GasParams,
    PhotonEnvironment,
    QuadratureError,
    RadialProfile,
    assemble_tensor,
    assemble_vector,
    azimuthal_radial_components,
    born_coefficient,
    form_factor,
    rayleigh_gans_diffusion,
    spherical_bessel_j,
    thermal_diffusion_constants,
    transfer_integrand,
)

FOUR_PI = 4.0 * math.pi


def exponential_profile(r_cut=8.0, decay="exponential") -> RadialProfile:
    return RadialProfile(fn=lambda r: np.exp(-r), r_cut=r_cut, decay=decay)


def gaussian_profile(width=1.3) -> RadialProfile:
    return RadialProfile(
        fn=lambda r: np.exp(-0.5 * (r / width) ** 2),
        r_cut=5.0 * width,
        decay="gaussian",
    )


def exponential_overlap(ell: int, q: float) -> float:
    """Closed form of Int r^2 e^-r j_ell(qr) dr for ell <= 2."""
    if ell == 0:
        return 2.0 / (1.0 + q * q) ** 2
    if ell == 1:
        return 2.0 * q / (1.0 + q * q) ** 2
    return (
        3.0 * math.atan(q) / q**3
        - 2.0 / (1.0 + q * q) ** 2
        - 3.0 / (q * q * (1.0 + q * q))
    )


class TestSphericalBessel:
    def test_matches_scipy_across_series_switch(self):
        x = np.concatenate(
            [np.linspace(1e-8, 0.999, 200), np.linspace(1.0, 30.0, 200)]
        )
        for ell in (0, 1, 2):
            mine = spherical_bessel_j(ell, x)
            ref = spherical_jn(ell, x)
            np.testing.assert_allclose(mine, ref, rtol=1e-12, atol=0.0)

    def test_series_branch_beats_naive_cancellation(self):
        # at x ~ 0.01 the trigonometric form of j_2 loses ~10 digits
        x = 0.009
        assert spherical_bessel_j(2, x) == pytest.approx(
            spherical_jn(2, x), rel=1e-13
        )

    def test_origin_values(self):
        assert spherical_bessel_j(0, 0.0) == 1.0
        assert spherical_bessel_j(1, 0.0) == 0.0
        assert spherical_bessel_j(2, 0.0) == 0.0

    def test_scalar_in_scalar_out(self):
        assert isinstance(spherical_bessel_j(1, 0.5), float)

    def test_unsupported_order(self):
        with pytest.raises(ValueError):
            spherical_bessel_j(3, 1.0)


class TestRadialProfile:
    def test_validation(self):
        with pytest.raises(ValueError):
            RadialProfile(fn=np.exp, r_cut=0.0)
        with pytest.raises(ValueError):
            RadialProfile(fn=np.exp, r_cut=1.0, decay="polynomial")

    def test_scaled_multiplies_values(self):
        prof = exponential_profile()
        doubled = prof.scaled(2.0)
        r = np.array([0.3, 1.7])
        np.testing.assert_allclose(doubled.fn(r), 2.0 * prof.fn(r), rtol=1e-15)
        assert doubled.r_cut == prof.r_cut
        assert doubled.decay == prof.decay


class TestFormFactor:
    def test_exponential_profile_closed_forms(self):
        prof = exponential_profile()
        for ell in (0, 1, 2):
            for q in (0.05, 0.3, 1.0, 2.7, 9.0):
                assert form_factor(prof, ell, q) == pytest.approx(
                    exponential_overlap(ell, q), rel=1e-10
                )

    def test_gaussian_monopole_closed_form(self):
        width = 1.3
        prof = gaussian_profile(width)
        for q in (0.0, 0.7, 2.0):
            exact = math.sqrt(math.pi / 2.0) * width**3 * math.exp(
                -0.5 * (q * width) ** 2
            )
            assert form_factor(prof, 0, q) == pytest.approx(exact, rel=1e-12)

    def test_zero_transfer_limits(self):
        prof = exponential_profile()
        assert form_factor(prof, 0, 0.0) == pytest.approx(2.0, rel=1e-10)
        assert form_factor(prof, 1, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert form_factor(prof, 2, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_matches_dense_trapezoid_oracle(self):
        prof = exponential_profile()
        for ell in (1, 2):
            oracle = trapezoid_form_factor(prof.fn, ell, 1.3, r_max=45.0)
            assert form_factor(prof, ell, 1.3) == pytest.approx(oracle, rel=1e-6)

    def test_rejects_negative_transfer(self):
        with pytest.raises(ValueError):
            form_factor(exponential_profile(), 0, -0.1)

    def test_non_decaying_tail_reports_quadrature_failure(self):
        liar = RadialProfile(
            fn=lambda r: np.ones_like(r), r_cut=2.0, decay="exponential"
        )
        with pytest.raises(QuadratureError):
            form_factor(liar, 0, 1.0)


class TestBornCoefficient:
    def test_prefactor_and_transfer_wavenumber(self):
        prof = gaussian_profile()
        mass, momentum, angle, hbar = 1.7, 2.2, 1.1, 0.8
        q = 2.0 * momentum * math.sin(0.5 * angle) / hbar
        for ell in (0, 1, 2):
            expected = (
                -(2.0 * mass * 1j**ell / hbar**2) * form_factor(prof, ell, q)
            )
            got = born_coefficient(prof, ell, mass, momentum, angle, hbar)
            assert got == pytest.approx(expected, rel=1e-12)

    def test_gaussian_monopole_vs_trapezoid_oracle(self):
        width = 1.3
        prof = gaussian_profile(width)
        mass, momentum, angle = 1.0, 1.5, 2.0
        q = 2.0 * momentum * math.sin(0.5 * angle)
        oracle = trapezoid_form_factor(prof.fn, 0, q, r_max=12.0, n=800_001)
        assert born_coefficient(prof, 0, mass, momentum, angle) == pytest.approx(
            -2.0 * mass * oracle, rel=1e-9
        )

    def test_forward_scattering_uses_zero_transfer(self):
        prof = gaussian_profile()
        forward = born_coefficient(prof, 0, 1.0, 3.0, 0.0)
        static = -2.0 * form_factor(prof, 0, 0.0)
        assert forward == pytest.approx(static, rel=1e-12)

    def test_argument_validation(self):
        prof = gaussian_profile()
        with pytest.raises(ValueError):
            born_coefficient(prof, 0, 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            born_coefficient(prof, 0, 1.0, -1.0, 1.0)
        with pytest.raises(ValueError):
            born_coefficient(prof, 0, 1.0, 1.0, 1.0, hbar=0.0)


class TestCouplingAssembly:
    def test_vector_reality_pattern(self):
        # real potential: f_{1,-1} = conj(f_{11}), f_10 imaginary
        rng = np.random.default_rng(7)
        for _ in range(20):
            f11 = complex(rng.standard_normal(), rng.standard_normal())
            f10 = 1j * rng.standard_normal()
            vec = assemble_vector({1: f11, -1: f11.conjugate(), 0: f10})
            assert np.abs(vec.real).max() < 1e-14 * max(np.abs(vec.imag).max(), 1.0)

    def test_vector_explicit_value(self):
        vec = assemble_vector({0: 1j})
        scale = math.sqrt(3.0 / (8.0 * math.pi))
        np.testing.assert_allclose(
            vec, [0.0, 0.0, scale * math.sqrt(2.0) * 1j], atol=1e-15
        )

    def test_vector_missing_entries_default_to_zero(self):
        np.testing.assert_array_equal(assemble_vector({}), np.zeros(3, dtype=complex))

    def test_tensor_is_traceless_and_symmetric_for_any_input(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            f2 = {
                m: complex(rng.standard_normal(), rng.standard_normal())
                for m in range(-2, 3)
            }
            tensor = assemble_tensor(f2)
            scale = np.abs(tensor).max()
            assert abs(np.trace(tensor)) <= 1e-14 * max(scale, 1.0)
            np.testing.assert_array_equal(tensor, tensor.T)

    def test_tensor_reality_pattern(self):
        # real potential: f_{2,-m} = (-1)^m conj(f_{2m}), f_20 real
        rng = np.random.default_rng(13)
        for _ in range(20):
            f22 = complex(rng.standard_normal(), rng.standard_normal())
            f21 = complex(rng.standard_normal(), rng.standard_normal())
            f20 = complex(rng.standard_normal())
            tensor = assemble_tensor(
                {2: f22, 1: f21, 0: f20, -1: -f21.conjugate(), -2: f22.conjugate()}
            )
            assert np.abs(tensor.imag).max() < 1e-14 * max(np.abs(tensor).max(), 1.0)


class TestAzimuthalComponents:
    def test_matches_angular_quadrature(self):
        a1, a2 = 0.8, 0.45
        prof = exponential_profile()
        components = azimuthal_radial_components(prof, a1, a2)
        assert set(components) == {(0, 0), (1, 0), (2, 0)}
        u, w = np.polynomial.legendre.leggauss(32)
        angular = 1.0 + a1 * u + (math.sqrt(5.0) * a2 / 2.0) * u**2
        harmonics = {
            0: np.full_like(u, math.sqrt(1.0 / FOUR_PI)),
            1: math.sqrt(3.0 / FOUR_PI) * u,
            2: math.sqrt(5.0 / (16.0 * math.pi)) * (3.0 * u**2 - 1.0),
        }
        r = 1.7
        for ell in (0, 1, 2):
            projected = 2.0 * math.pi * np.sum(w * angular * harmonics[ell])
            expected = projected * math.exp(-r)
            assert complex(components[(ell, 0)].fn(r)) == pytest.approx(
                expected, rel=1e-13
            )


class TestCollisionRateBridge:
    """One momentum transfer at a time, the collision amplitudes must feed
    the orientation-localization constants and land on the same numbers as
    the thermal-average integrand."""

    GAS = GasParams(
        number_density=0.7, mass=2.0, temperature=0.5, hbar=1.0, boltzmann=1.0
    )
    A1, A2 = 0.8, 0.45

    def test_both_channels_for_several_transfers(self):
        gas = self.GAS
        prof = exponential_profile()
        components = azimuthal_radial_components(prof, self.A1, self.A2)
        rate = (
            16.0
            * gas.number_density
            * math.sqrt(2.0 * math.pi * gas.mass * gas.boltzmann * gas.temperature)
            / gas.mass
        )
        for xi in (0.3, 1.0, 2.2):
            momentum = gas.thermal_momentum * xi
            f10 = born_coefficient(
                components[(1, 0)], 1, gas.mass, momentum, math.pi, gas.hbar
            )
            f20 = born_coefficient(
                components[(2, 0)], 2, gas.mass, momentum, math.pi, gas.hbar
            )
            vector = assemble_vector({0: f10})
            tensor = assemble_tensor({0: f20})
            assert np.abs(vector.real).max() == 0.0
            assert np.abs(tensor.imag).max() == 0.0
            spec = AnisotropySpec(
                amplitude=float(np.linalg.norm(vector)),
                axis=(0.0, 0.0, 1.0),
                b_eigenvalues=np.linalg.eigvalsh(tensor.real),
            )
            coeffs = diffusion_constants(spec, hbar=gas.hbar)
            ch1, ch2 = transfer_integrand(prof, self.A1, self.A2, gas, xi)
            assert ch1 == pytest.approx(rate * coeffs.d1, rel=1e-12)
            # the azimuthal tensor is symmetric about the body axis: two
            # equal in-plane constants, nothing about the axis itself
            assert coeffs.d2[2] == pytest.approx(0.0, abs=1e-15 * coeffs.d2[0])
            assert ch2 == pytest.approx(rate * coeffs.d2[0], rel=1e-12)
            assert ch2 == pytest.approx(rate * coeffs.d2[1], rel=1e-12)

    def test_density_and_anisotropy_scalings(self):
        gas = self.GAS
        prof = exponential_profile()
        base = transfer_integrand(prof, self.A1, self.A2, gas, 0.9)
        denser = GasParams(
            number_density=3.0 * gas.number_density,
            mass=gas.mass,
            temperature=gas.temperature,
            hbar=1.0,
            boltzmann=1.0,
        )
        tripled = transfer_integrand(prof, self.A1, self.A2, denser, 0.9)
        assert tripled[0] == pytest.approx(3.0 * base[0], rel=1e-14)
        assert tripled[1] == pytest.approx(3.0 * base[1], rel=1e-14)
        doubled = transfer_integrand(prof, 2.0 * self.A1, 2.0 * self.A2, gas, 0.9)
        assert doubled[0] == pytest.approx(4.0 * base[0], rel=1e-14)
        assert doubled[1] == pytest.approx(4.0 * base[1], rel=1e-14)

    def test_rejects_negative_reduced_momentum(self):
        with pytest.raises(ValueError):
            transfer_integrand(exponential_profile(), 1.0, 1.0, self.GAS, -0.5)


class TestThermalAverage:
    def test_matches_dense_closed_form_oracle(self):
        gas = GasParams(
            number_density=0.7, mass=2.0, temperature=0.5, hbar=1.0, boltzmann=1.0
        )
        a1, a2 = 0.8, 0.45
        prof = exponential_profile(r_cut=35.0, decay="compact")
        d1, d2 = thermal_diffusion_constants(prof, a1, a2, gas, rel_tol=1e-4)
        assert d1 >= 0.0 and d2 >= 0.0

        cut = math.sqrt(18.0 * math.log(10.0))
        xi = np.linspace(0.0, cut, 200_001)
        q = 2.0 * gas.thermal_momentum * xi / gas.hbar
        prefactor = (
            math.sqrt(math.pi)
            * gas.thermal_momentum
            * 32.0
            * gas.number_density
            * gas.mass
            / (3.0 * gas.hbar**2)
        )
        safe = np.where(q == 0.0, 1.0, q)
        g1 = 2.0 * q / (1.0 + q * q) ** 2
        g2 = np.where(
            q == 0.0,
            0.0,
            3.0 * np.arctan(safe) / safe**3
            - 2.0 / (1.0 + safe * safe) ** 2
            - 3.0 / (safe * safe * (1.0 + safe * safe)),
        )
        weight = xi * np.exp(-xi * xi)
        oracle_d1 = np.trapezoid(weight * prefactor * a1**2 * g1**2, xi)
        oracle_d2 = np.trapezoid(weight * prefactor * a2**2 * g2**2, xi)
        assert d1 == pytest.approx(oracle_d1, rel=1e-6)
        assert d2 == pytest.approx(oracle_d2, rel=1e-6)


class TestGasParams:
    def test_field_validation(self):
        good = dict(number_density=1.0, mass=1.0, temperature=1.0)
        for field in good:
            broken = dict(good)
            broken[field] = 0.0
            with pytest.raises(ValueError):
                GasParams(**broken)
        with pytest.raises(ValueError):
            GasParams(**good, hbar=-1.0)
        with pytest.raises(ValueError):
            GasParams(**good, boltzmann=0.0)

    def test_thermal_momentum(self):
        gas = GasParams(
            number_density=1.0, mass=3.0, temperature=2.0, hbar=1.0, boltzmann=1.0
        )
        assert gas.thermal_momentum == pytest.approx(math.sqrt(12.0), rel=1e-15)

    def test_si_defaults(self):
        gas = GasParams(number_density=1.0, mass=1.0, temperature=1.0)
        assert gas.hbar == constants.hbar
        assert gas.boltzmann == constants.k


class TestStandingWaveRates:
    ENV = PhotonEnvironment(
        volume=2.0,
        field_amplitude=3.0,
        wavenumber=1.5,
        susceptibility=(0.1, 0.4, 0.9),
        permittivity=1.0,
        hbar=1.0,
    )

    def test_frozen_reference_values(self):
        np.testing.assert_allclose(
            rayleigh_gans_diffusion(self.ENV),
            [0.26857396646757337, 0.6875493541569879, 0.09668662792832644],
            rtol=1e-13,
        )

    def test_isotropic_body_is_silent(self):
        env = PhotonEnvironment(
            volume=2.0,
            field_amplitude=3.0,
            wavenumber=1.5,
            susceptibility=(0.7, 0.7, 0.7),
            permittivity=1.0,
            hbar=1.0,
        )
        assert np.all(rayleigh_gans_diffusion(env) == 0.0)

    def test_symmetry_axis_stays_diffusion_free(self):
        env = PhotonEnvironment(
            volume=2.0,
            field_amplitude=3.0,
            wavenumber=1.5,
            susceptibility=(0.2, 0.2, 0.9),
            permittivity=1.0,
            hbar=1.0,
        )
        rates = rayleigh_gans_diffusion(env)
        assert rates[2] == 0.0
        assert rates[0] == rates[1]
        assert rates[0] > 0.0

    def test_cubic_wavenumber_scaling_is_exact(self):
        base = rayleigh_gans_diffusion(self.ENV)
        doubled = PhotonEnvironment(
            volume=2.0,
            field_amplitude=3.0,
            wavenumber=3.0,
            susceptibility=(0.1, 0.4, 0.9),
            permittivity=1.0,
            hbar=1.0,
        )
        np.testing.assert_array_equal(rayleigh_gans_diffusion(doubled), 8.0 * base)

    def test_quadratic_anisotropy_scaling_is_exact(self):
        def env_with_gap(gap):
            return PhotonEnvironment(
                volume=2.0,
                field_amplitude=3.0,
                wavenumber=1.5,
                susceptibility=(0.0, 0.0, gap),
                permittivity=1.0,
                hbar=1.0,
            )

        base = rayleigh_gans_diffusion(env_with_gap(0.25))
        np.testing.assert_array_equal(
            rayleigh_gans_diffusion(env_with_gap(0.5)), 4.0 * base
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            PhotonEnvironment(
                volume=0.0, field_amplitude=1.0, wavenumber=1.0,
                susceptibility=(1, 2, 3),
            )
        with pytest.raises(ValueError):
            PhotonEnvironment(
                volume=1.0, field_amplitude=1.0, wavenumber=-1.0,
                susceptibility=(1, 2, 3),
            )
        with pytest.raises(ValueError):
            PhotonEnvironment(
                volume=1.0, field_amplitude=1.0, wavenumber=1.0,
                susceptibility=(1, 2, 3), permittivity=0.0,
            )
        with pytest.raises(ValueError):
            PhotonEnvironment(
                volume=1.0, field_amplitude=1.0, wavenumber=1.0,
                susceptibility=(1.0, 2.0),
            )
