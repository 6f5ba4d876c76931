"""Orientational decoherence rates and angular momentum diffusion tensors.

An environment that monitors a rigid rotor's orientation couples through a
channel linear in a body direction (a unit vector ``axis`` with scalar
amplitude A) and a channel quadratic in the body axes (a symmetric tensor
with eigenvalues B_i on an orthonormal body triad).  Both channels drive
angular momentum diffusion with constants

    d1   = hbar^2 A^2 / 6
    d2_i = (2 hbar^2 / 15) (B_j - B_k)^2,    (i, j, k) cyclic,

and suppress coherence between orientations Omega, Omega' at the pairwise
localization rates

    F_lin (Omega, Omega') = (2 d1 / hbar^2) [1 - a(Omega) . a(Omega')]
    F_quad(Omega, Omega') = (1 / 2 hbar^2) sum_i (sum_j d2_j - 2 d2_i)
                            |b_i(Omega) x b_i(Omega')|^2

where a(Omega) = R(Omega) axis and b_i(Omega) are the rotated tensor axes.
The orientation-resolved diffusion tensors are

    D_lin (Omega) = d1 [identity - a(Omega) a(Omega)^T]
    D_quad(Omega) = sum_i d2_i b_i(Omega) b_i(Omega)^T

so that the total angular momentum obeys d<J^2>/dt = 4 d1 + 2 sum_i d2_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rotation import EulerAngles, rotation_from_euler

__all__ = [
    "AnisotropySpec",
    "DiffusionCoefficients",
    "body_diffusion_matrix",
    "diffusion_constants",
    "diffusion_tensor_linear",
    "diffusion_tensor_quadratic",
    "localization_rate_linear",
    "localization_rate_quadratic",
    "localization_rates_planar",
    "localization_rates_symmetric",
]


@dataclass(frozen=True)
class AnisotropySpec:
    """Environment coupling anisotropy of a rigid rotor.

    amplitude      scalar strength A >= 0 of the linear (vector) channel;
                   its units absorb the collision rate so that d1 comes out
                   in angular momentum squared per time.
    axis           unit body-frame direction the linear channel couples to.
    b_eigenvalues  eigenvalues (B_1, B_2, B_3) of the quadratic (tensor)
                   channel, any real scalars.
    b_axes         orthonormal eigenbasis of the tensor channel, columns,
                   body frame; defaults to the body axes themselves.
    """

    amplitude: float
    axis: np.ndarray
    b_eigenvalues: np.ndarray
    b_axes: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self) -> None:
        amplitude = float(self.amplitude)
        if amplitude < 0.0:
            raise ValueError(f"amplitude must be >= 0, got {amplitude}")
        axis = np.asarray(self.axis, dtype=float).reshape(3).copy()
        norm = float(np.linalg.norm(axis))
        if not math.isclose(norm, 1.0, rel_tol=0.0, abs_tol=1e-9):
            raise ValueError(f"axis must be a unit vector, |axis| = {norm}")
        axis /= norm
        b_eigenvalues = np.asarray(self.b_eigenvalues, dtype=float).reshape(3).copy()
        b_axes = np.asarray(self.b_axes, dtype=float).reshape(3, 3).copy()
        if not np.allclose(b_axes.T @ b_axes, np.eye(3), atol=1e-9):
            raise ValueError("b_axes must form an orthonormal triad (columns)")
        object.__setattr__(self, "amplitude", amplitude)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "b_eigenvalues", b_eigenvalues)
        object.__setattr__(self, "b_axes", b_axes)


@dataclass(frozen=True)
class DiffusionCoefficients:
    """Diffusion constants of the two channels.

    ``d1`` is the scalar constant of the linear channel; ``d2`` holds the
    per-axis constants of the quadratic channel.  ``total_j2_rate`` is the
    growth rate of <J^2> they imply.
    """

    d1: float
    d2: np.ndarray

    @property
    def total_j2_rate(self) -> float:
        return 4.0 * self.d1 + 2.0 * float(np.sum(self.d2))


def diffusion_constants(spec: AnisotropySpec, hbar: float = 1.0) -> DiffusionCoefficients:
    """Channel diffusion constants for an anisotropy specification."""
    h2 = hbar * hbar
    d1 = h2 * spec.amplitude * spec.amplitude / 6.0
    b = spec.b_eigenvalues
    d2 = (2.0 * h2 / 15.0) * np.array(
        [
            (b[1] - b[2]) ** 2,
            (b[2] - b[0]) ** 2,
            (b[0] - b[1]) ** 2,
        ]
    )
    return DiffusionCoefficients(d1=d1, d2=d2)


def _rotated_axis(spec: AnisotropySpec, omega: EulerAngles) -> np.ndarray:
    return rotation_from_euler(omega) @ spec.axis


def localization_rate_linear(
    spec: AnisotropySpec,
    omega: EulerAngles,
    omega_prime: EulerAngles,
    hbar: float = 1.0,
) -> float:
    """Coherence decay rate of the linear channel between two orientations.

    1 - a.a' is evaluated as |a - a'|^2 / 2, which is exact for unit vectors,
    keeps the rate nonnegative, and returns exactly 0.0 at coincidence.
    """
    d1 = diffusion_constants(spec, hbar).d1
    a = _rotated_axis(spec, omega)
    a_prime = _rotated_axis(spec, omega_prime)
    diff = a - a_prime
    return (2.0 * d1 / (hbar * hbar)) * 0.5 * float(diff @ diff)


def localization_rate_quadratic(
    spec: AnisotropySpec,
    omega: EulerAngles,
    omega_prime: EulerAngles,
    hbar: float = 1.0,
) -> float:
    """Coherence decay rate of the quadratic channel between two orientations.

    Vanishes identically when the orientations differ by a pi rotation about
    the third tensor axis, reflecting the head-tail symmetry of the channel.
    """
    d2 = diffusion_constants(spec, hbar).d2
    weights = np.sum(d2) - 2.0 * d2
    rot = rotation_from_euler(omega) @ spec.b_axes
    rot_prime = rotation_from_euler(omega_prime) @ spec.b_axes
    total = 0.0
    for i in range(3):
        cross = np.cross(rot[:, i], rot_prime[:, i])
        total += float(weights[i]) * float(cross @ cross)
    return total / (2.0 * hbar * hbar)


def localization_rates_symmetric(
    d1: float,
    d2: float,
    m_axis: np.ndarray,
    m_axis_prime: np.ndarray,
    hbar: float = 1.0,
) -> tuple[float, float]:
    """Localization rates of a symmetric rotor given its figure axis.

    For a symmetric rotor only the figure axis direction m matters:
    F_lin = (2 d1/hbar^2)(1 - m.m') and F_quad = (d2/hbar^2)|m x m'|^2,
    where d2 is the single quadratic constant (2 hbar^2/15)(B_perp - B_par)^2.
    """
    m = np.asarray(m_axis, dtype=float)
    m_prime = np.asarray(m_axis_prime, dtype=float)
    h2 = hbar * hbar
    diff = m - m_prime
    f_lin = (2.0 * d1 / h2) * 0.5 * float(diff @ diff)
    cross = np.cross(m, m_prime)
    f_quad = (d2 / h2) * float(cross @ cross)
    return f_lin, f_quad


def localization_rates_planar(
    d1: float,
    d2: float,
    alpha: float,
    alpha_prime: float,
    hbar: float = 1.0,
) -> tuple[float, float]:
    """Localization rates of a planar rotor between angles alpha, alpha'.

    F_lin = (4 d1/hbar^2) sin^2((alpha - alpha')/2), maximal at opposite
    orientations; F_quad = (d2/hbar^2) sin^2(alpha - alpha'), pi-periodic.
    """
    h2 = hbar * hbar
    delta = alpha - alpha_prime
    f_lin = (4.0 * d1 / h2) * math.sin(0.5 * delta) ** 2
    f_quad = (d2 / h2) * math.sin(delta) ** 2
    return f_lin, f_quad


def diffusion_tensor_linear(
    spec: AnisotropySpec, omega: EulerAngles, hbar: float = 1.0
) -> np.ndarray:
    """Space-fixed diffusion tensor of the linear channel at one orientation.

    d1 (identity - a a^T): rank 2, degenerate along the rotated coupling axis
    (no momentum kicks about it).
    """
    d1 = diffusion_constants(spec, hbar).d1
    a = _rotated_axis(spec, omega)
    return d1 * (np.eye(3) - np.outer(a, a))


def diffusion_tensor_quadratic(
    spec: AnisotropySpec, omega: EulerAngles, hbar: float = 1.0
) -> np.ndarray:
    """Space-fixed diffusion tensor of the quadratic channel at one orientation."""
    d2 = diffusion_constants(spec, hbar).d2
    rot = rotation_from_euler(omega) @ spec.b_axes
    out = np.zeros((3, 3))
    for i in range(3):
        out += d2[i] * np.outer(rot[:, i], rot[:, i])
    return out


def body_diffusion_matrix(spec: AnisotropySpec, hbar: float = 1.0) -> np.ndarray:
    """Total diffusion tensor in the body frame (both channels summed).

    Reference orientation of the space-fixed tensors; rotating it gives the
    tensor at any orientation, D(Omega) = R D0 R^T.
    """
    d = diffusion_constants(spec, hbar)
    out = d.d1 * (np.eye(3) - np.outer(spec.axis, spec.axis))
    for i in range(3):
        col = spec.b_axes[:, i]
        out += d.d2[i] * np.outer(col, col)
    return out
