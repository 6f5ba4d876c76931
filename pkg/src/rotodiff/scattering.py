"""Microscopic origin of the diffusion constants: single-collision input.

Weak anisotropic scattering off a rigid body is summarized, per multipole
order ell and azimuthal index m, by Born amplitudes

    f_{ell m}(q) = -(2 mass / hbar^2) i^ell Int_0^inf r^2 V_{ell m}(r)
                   j_ell(q r) dr,

with q the momentum transfer over hbar and j_ell a spherical Bessel
function.  The ell = 1 amplitudes assemble into a vector coupling and the
ell = 2 amplitudes into a symmetric traceless tensor coupling; their
magnitudes feed the localization-rate constants of
:mod:`rotodiff.localization`.  For a thermal gas the momentum-transfer
average produces the two diffusion constants directly
(:func:`thermal_diffusion_constants`), and for a far-detuned standing
light wave the same constants follow in closed form
(:func:`rayleigh_gans_diffusion`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
from scipy import constants, integrate

__all__ = [
    "GasParams",
    "PhotonEnvironment",
    "QuadratureError",
    "RadialProfile",
    "assemble_tensor",
    "assemble_vector",
    "azimuthal_radial_components",
    "born_coefficient",
    "form_factor",
    "rayleigh_gans_diffusion",
    "spherical_bessel_j",
    "thermal_diffusion_constants",
    "transfer_integrand",
]

_DECAYS = ("gaussian", "exponential", "compact")
# Below this argument the trigonometric forms of j_1, j_2 cancel badly (the
# lost digits scale like 1/x^2 and 1/x^4); the power series is exact to
# machine precision there with 14 terms.
_SERIES_SWITCH = 1.0
_SERIES_TERMS = 14
# exp(-xi^2) < 1e-18 beyond this point; the thermal tail is numerically zero
_THERMAL_CUT = math.sqrt(18.0 * math.log(10.0))
_QUAD_LIMIT = 400


class QuadratureError(RuntimeError):
    """Raised when an adaptive quadrature cannot reach its tolerance."""


@dataclass(frozen=True)
class RadialProfile:
    """Radial factor of one potential component.

    ``fn`` maps radius arrays to (possibly complex) values.  ``r_cut``
    splits the quadrature: for ``decay="compact"`` the profile vanishes
    identically beyond it, otherwise integration continues to infinity
    with ``decay`` merely labelling the expected falloff.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    r_cut: float
    decay: str = "exponential"

    def __post_init__(self) -> None:
        if self.r_cut <= 0.0:
            raise ValueError(f"r_cut must be positive, got {self.r_cut}")
        if self.decay not in _DECAYS:
            raise ValueError(f"decay must be one of {_DECAYS}, got {self.decay!r}")

    def scaled(self, factor: complex) -> "RadialProfile":
        fn = self.fn
        return RadialProfile(
            fn=lambda r, _fn=fn, _c=factor: _c * _fn(r),
            r_cut=self.r_cut,
            decay=self.decay,
        )


def _bessel_series_factor(ell: int, x2: np.ndarray) -> np.ndarray:
    """sum_s (-x^2/2)^s / [s! (2l+3)(2l+5)...(2l+2s+1)], the x^l-stripped series."""
    total = np.ones_like(x2)
    term = np.ones_like(x2)
    for s in range(1, _SERIES_TERMS):
        term = term * (-x2) / (2.0 * s * (2.0 * s + 2.0 * ell + 1.0))
        total = total + term
    return total


def spherical_bessel_j(ell: int, x):
    """Spherical Bessel j_ell for ell <= 2, stable at small argument.

    Uses the trigonometric closed forms above |x| = 1 and the power series
    below, where the closed forms for ell >= 1 lose digits to cancellation.
    """
    if ell not in (0, 1, 2):
        raise ValueError(f"only ell in (0, 1, 2) supported, got {ell}")
    arr = np.asarray(x, dtype=float)
    small = np.abs(arr) < _SERIES_SWITCH
    safe = np.where(small, 1.0, arr)
    x2 = arr * arr
    factor = _bessel_series_factor(ell, x2)
    if ell == 0:
        exact = np.sin(safe) / safe
        series = factor
    elif ell == 1:
        exact = np.sin(safe) / safe**2 - np.cos(safe) / safe
        series = (arr / 3.0) * factor
    else:
        exact = (3.0 / safe**3 - 1.0 / safe) * np.sin(safe) - (3.0 / safe**2) * np.cos(safe)
        series = (x2 / 15.0) * factor
    out = np.where(small, series, exact)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def _quad_real(fn, lower, upper, epsabs, epsrel):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, estimate = integrate.quad(
                fn, lower, upper, epsabs=epsabs, epsrel=epsrel, limit=_QUAD_LIMIT
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(
                f"quadrature on [{lower}, {upper}] failed to converge: {exc}"
            ) from exc
    return value, estimate


def _quad_complex(fn, lower, upper, epsabs, epsrel) -> complex:
    real, _ = _quad_real(lambda r: np.real(fn(r)), lower, upper, epsabs, epsrel)
    imag, _ = _quad_real(lambda r: np.imag(fn(r)), lower, upper, epsabs, epsrel)
    return complex(real, imag)


def form_factor(profile: RadialProfile, ell: int, k_transfer: float, rel_tol: float = 1e-10) -> complex:
    """Radial overlap g_ell(k) = Int r^2 V(r) j_ell(k r) dr."""
    if k_transfer < 0.0:
        raise ValueError(f"k_transfer must be non-negative, got {k_transfer}")

    def integrand(r):
        return r * r * profile.fn(r) * spherical_bessel_j(ell, k_transfer * r)

    head = _quad_complex(integrand, 0.0, profile.r_cut, 0.0, rel_tol)
    if profile.decay == "compact":
        return head
    # The tail is usually a tiny correction; give it an absolute target set
    # by the head so near-zero tails converge instead of chasing epsrel.
    tail_abs = rel_tol * (abs(head) + 1e-300)
    tail = _quad_complex(integrand, profile.r_cut, np.inf, tail_abs, rel_tol)
    return head + tail


def born_coefficient(
    profile: RadialProfile,
    ell: int,
    mass: float,
    momentum: float,
    angle: float,
    hbar: float = 1.0,
    rel_tol: float = 1e-10,
) -> complex:
    """First-order scattering amplitude component for one multipole.

    ``momentum`` is the incoming momentum magnitude and ``angle`` the
    deflection; the transfer wavenumber is q = 2 p sin(angle/2) / hbar.
    """
    if mass <= 0.0 or hbar <= 0.0:
        raise ValueError("mass and hbar must be positive")
    if momentum < 0.0:
        raise ValueError(f"momentum must be non-negative, got {momentum}")
    q = 2.0 * momentum * math.sin(0.5 * angle) / hbar
    g = form_factor(profile, ell, q, rel_tol)
    return -(2.0 * mass * (1j**ell) / hbar**2) * g


def assemble_vector(f1: Mapping[int, complex]) -> np.ndarray:
    """Cartesian vector coupling from the ell = 1 amplitudes {m: f_1m}.

    For potentials satisfying the reality constraint
    V_{1,-m} = -conj(V_{1m}) ... i.e. f_{1,-m} = conj(f_{1m}) and f_10
    imaginary ... the result is purely imaginary.
    """
    f_m1 = complex(f1.get(-1, 0.0))
    f_p1 = complex(f1.get(1, 0.0))
    f_0 = complex(f1.get(0, 0.0))
    scale = math.sqrt(3.0 / (8.0 * math.pi))
    return scale * np.array(
        [f_m1 - f_p1, -1j * (f_p1 + f_m1), math.sqrt(2.0) * f_0],
        dtype=complex,
    )


def assemble_tensor(f2: Mapping[int, complex]) -> np.ndarray:
    """Symmetric traceless tensor coupling from the ell = 2 amplitudes.

    Real potentials give a real matrix; the trace vanishes identically for
    any input.
    """
    f_m2 = complex(f2.get(-2, 0.0))
    f_m1 = complex(f2.get(-1, 0.0))
    f_0 = complex(f2.get(0, 0.0))
    f_p1 = complex(f2.get(1, 0.0))
    f_p2 = complex(f2.get(2, 0.0))
    scale = math.sqrt(15.0 / (32.0 * math.pi))
    off = math.sqrt(2.0 / 3.0)
    out = np.empty((3, 3), dtype=complex)
    out[0, 0] = f_p2 + f_m2 - off * f_0
    out[1, 1] = -f_p2 - f_m2 - off * f_0
    out[2, 2] = math.sqrt(8.0 / 3.0) * f_0
    out[0, 1] = out[1, 0] = 1j * (f_p2 - f_m2)
    out[0, 2] = out[2, 0] = f_m1 - f_p1
    out[1, 2] = out[2, 1] = -1j * (f_p1 + f_m1)
    return scale * out


def azimuthal_radial_components(
    profile: RadialProfile, a1: float, a2: float
) -> dict[tuple[int, int], RadialProfile]:
    """Multipole components of v(r) [1 + a1 u + (sqrt(5) a2 / 2) u^2].

    ``u`` is the cosine of the polar angle from the body symmetry axis, so
    only m = 0 components appear: the u^2 term splits between the monopole
    and the quadrupole.  Keys are (ell, m).
    """
    root_4pi = math.sqrt(4.0 * math.pi)
    return {
        (0, 0): profile.scaled(root_4pi * (1.0 + math.sqrt(5.0) * a2 / 6.0)),
        (1, 0): profile.scaled(math.sqrt(4.0 * math.pi / 3.0) * a1),
        (2, 0): profile.scaled(root_4pi * a2 / 3.0),
    }


@dataclass(frozen=True)
class GasParams:
    """Background gas: number density, particle mass, temperature.

    Defaults put hbar and the Boltzmann constant in SI; override both with
    1.0 to work in natural units.
    """

    number_density: float
    mass: float
    temperature: float
    hbar: float = constants.hbar
    boltzmann: float = constants.k

    def __post_init__(self) -> None:
        for name in ("number_density", "mass", "temperature", "hbar", "boltzmann"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")

    @property
    def thermal_momentum(self) -> float:
        """sqrt(2 m k T), the momentum scale of the Maxwell distribution."""
        return math.sqrt(2.0 * self.mass * self.boltzmann * self.temperature)


def transfer_integrand(
    profile: RadialProfile,
    a1: float,
    a2: float,
    gas: GasParams,
    xi: float,
    rel_tol: float = 1e-10,
) -> tuple[float, float]:
    """Both diffusion-constant integrands at reduced momentum xi, without
    the thermal weight xi exp(-xi^2).

    Returns the pair (vector channel, tensor channel):

        sqrt(2 pi m k T) (32 n m a_i^2 / 3 hbar^2) |g_i(2 sqrt(2 m k T) xi / hbar)|^2

    with g_1, g_2 the ell = 1, 2 form factors of the bare radial profile.
    Exposed separately so the collision picture can be cross-checked
    against the localization-rate constants one momentum transfer at a
    time.
    """
    if xi < 0.0:
        raise ValueError(f"xi must be non-negative, got {xi}")
    q = 2.0 * gas.thermal_momentum * xi / gas.hbar
    prefactor = (
        math.sqrt(math.pi)
        * gas.thermal_momentum
        * 32.0
        * gas.number_density
        * gas.mass
        / (3.0 * gas.hbar**2)
    )
    g1 = form_factor(profile, 1, q, rel_tol)
    g2 = form_factor(profile, 2, q, rel_tol)
    return (
        prefactor * a1**2 * abs(g1) ** 2,
        prefactor * a2**2 * abs(g2) ** 2,
    )


def thermal_diffusion_constants(
    profile: RadialProfile,
    a1: float,
    a2: float,
    gas: GasParams,
    rel_tol: float = 1e-8,
) -> tuple[float, float]:
    """Maxwell-Boltzmann average of the two diffusion-rate integrands.

    Integrates xi exp(-xi^2) times :func:`transfer_integrand` over the
    reduced momentum by Gauss-Legendre quadrature, cutting the thermal
    tail where the weight drops below 1e-18 of its peak.  The node count
    doubles until both results settle to ``rel_tol``; the integrand is
    analytic in xi, so convergence is geometric.
    """

    def gauss(n_nodes: int) -> np.ndarray:
        nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
        totals = np.zeros(2)
        for node, weight in zip(nodes, weights):
            xi = 0.5 * _THERMAL_CUT * (node + 1.0)
            hooks = transfer_integrand(profile, a1, a2, gas, xi, rel_tol=rel_tol / 100.0)
            totals += (
                0.5 * _THERMAL_CUT * weight * xi * math.exp(-xi * xi)
            ) * np.asarray(hooks)
        return totals

    previous = gauss(32)
    for n_nodes in (64, 128, 256):
        current = gauss(n_nodes)
        shift = np.abs(current - previous)
        if np.all(shift <= rel_tol * np.maximum(np.abs(current), 1e-300)):
            return float(current[0]), float(current[1])
        previous = current
    raise QuadratureError(
        "thermal average did not settle by 256 Gauss nodes; "
        f"last change {tuple(shift)} against target {rel_tol}"
    )


@dataclass(frozen=True)
class PhotonEnvironment:
    """Far-detuned standing-wave light field around a small dielectric.

    ``susceptibility`` holds the three principal susceptibilities of the
    body.  Defaults put permittivity and hbar in SI.
    """

    volume: float
    field_amplitude: float
    wavenumber: float
    susceptibility: np.ndarray
    permittivity: float = constants.epsilon_0
    hbar: float = constants.hbar

    def __post_init__(self) -> None:
        if self.volume <= 0.0 or self.wavenumber <= 0.0:
            raise ValueError("volume and wavenumber must be positive")
        if self.permittivity <= 0.0 or self.hbar <= 0.0:
            raise ValueError("permittivity and hbar must be positive")
        chi = np.asarray(self.susceptibility, dtype=float).reshape(3)
        object.__setattr__(self, "susceptibility", chi)


def rayleigh_gans_diffusion(env: PhotonEnvironment) -> np.ndarray:
    """Tensor-channel diffusion constants from elastic light scattering.

    Component i is proportional to the squared difference of the other two
    principal susceptibilities, so any isotropic part of the response drops
    out and rotation about an axis of equal susceptibilities stays
    diffusion-free:

        d2_i = (eps0 hbar V^2 E^2 k^3 / 36 pi) (chi_j - chi_k)^2.
    """
    chi = env.susceptibility
    prefactor = (
        env.permittivity
        * env.hbar
        * env.volume**2
        * env.field_amplitude**2
        * env.wavenumber**3
        / (36.0 * math.pi)
    )
    diffs = np.array(
        [chi[1] - chi[2], chi[2] - chi[0], chi[0] - chi[1]]
    )
    return prefactor * diffs**2
