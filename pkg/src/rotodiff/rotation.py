"""SO(3) orientation utilities shared by the diffusion modules.

Euler angles follow the z-y'-z'' convention: a rotation by ``alpha`` about
the space-fixed z axis, then ``beta`` about the rotated y axis (the nodal
line), then ``gamma`` about the body-fixed third axis.  In fixed-axis form

    R(alpha, beta, gamma) = Rz(alpha) @ Ry(beta) @ Rz(gamma)

and the nodal line is e_nu(alpha) = (-sin alpha, cos alpha, 0).  Matrices
act on column vectors from the left; the body axes of an orientation are
the columns of R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

__all__ = [
    "TWO_PI",
    "EulerAngles",
    "InertiaTensor",
    "body_axes",
    "euler_from_rotation",
    "is_rotation",
    "nodal_line",
    "reorthonormalize",
    "rotation_about_axis",
    "rotation_from_euler",
    "rotvec_to_matrix",
    "sample_uniform_orientation",
    "sample_uniform_rotations",
    "skew",
]


@dataclass(frozen=True)
class EulerAngles:
    """Orientation in z-y'-z'' Euler angles, radians.

    ``alpha`` and ``gamma`` are normalized into [0, 2*pi) on construction;
    ``beta`` must lie in [0, pi].
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        beta = float(self.beta)
        if not 0.0 <= beta <= math.pi:
            raise ValueError(f"beta must lie in [0, pi], got {beta}")
        object.__setattr__(self, "alpha", float(self.alpha) % TWO_PI)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", float(self.gamma) % TWO_PI)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class InertiaTensor:
    """Principal moments of inertia and their body-frame axes.

    ``moments`` are the strictly positive principal values; ``axes`` holds
    the orthonormal principal directions as columns (defaults to the body
    frame itself).
    """

    moments: np.ndarray
    axes: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self) -> None:
        moments = np.asarray(self.moments, dtype=float).reshape(3).copy()
        axes = np.asarray(self.axes, dtype=float).reshape(3, 3).copy()
        if not np.all(moments > 0.0):
            raise ValueError(f"principal moments must be positive, got {moments}")
        if not np.allclose(axes.T @ axes, np.eye(3), atol=1e-12):
            raise ValueError("principal axes must form an orthonormal triad")
        object.__setattr__(self, "moments", moments)
        object.__setattr__(self, "axes", axes)

    @property
    def body_matrix(self) -> np.ndarray:
        """Inertia tensor in body coordinates, axes @ diag(moments) @ axes.T."""
        return (self.axes * self.moments) @ self.axes.T

    @property
    def body_inverse(self) -> np.ndarray:
        """Inverse inertia tensor in body coordinates."""
        return (self.axes / self.moments) @ self.axes.T


def rotation_from_euler(angles: EulerAngles) -> np.ndarray:
    """Rotation matrix for z-y'-z'' Euler angles.

    Equals Rz(alpha) @ Ry(beta) @ Rz(gamma); written out explicitly to avoid
    two matrix products.
    """
    ca, sa = math.cos(angles.alpha), math.sin(angles.alpha)
    cb, sb = math.cos(angles.beta), math.sin(angles.beta)
    cg, sg = math.cos(angles.gamma), math.sin(angles.gamma)
    return np.array(
        [
            [ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb],
            [sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb],
            [-sb * cg, sb * sg, cb],
        ]
    )


def euler_from_rotation(matrix: np.ndarray, *, tol: float = 1e-9) -> EulerAngles:
    """Extract z-y'-z'' Euler angles from a rotation matrix.

    At the gimbal degeneracy (beta = 0 or pi, where only alpha +/- gamma is
    determined) the convention gamma = 0 is applied.  ``tol`` bounds both
    the accepted deviation from orthonormality and the width of the
    degenerate band.
    """
    m = np.asarray(matrix, dtype=float)
    if not is_rotation(m, tol=max(tol, 1e-12)):
        raise ValueError("matrix is not a rotation within tolerance")
    cb = min(1.0, max(-1.0, m[2, 2]))
    beta = math.acos(cb)
    if math.sin(beta) > tol:
        alpha = math.atan2(m[1, 2], m[0, 2])
        gamma = math.atan2(m[2, 1], -m[2, 0])
    elif cb > 0.0:
        # beta ~ 0: matrix is Rz(alpha + gamma)
        alpha = math.atan2(m[1, 0], m[0, 0])
        gamma = 0.0
    else:
        # beta ~ pi: matrix is Rz(alpha - gamma) @ Ry(pi)
        alpha = math.atan2(-m[1, 0], -m[0, 0])
        gamma = 0.0
    return EulerAngles(alpha, beta, gamma)


def nodal_line(alpha: float) -> np.ndarray:
    """Unit vector along the rotated y axis after the first Euler rotation."""
    return np.array([-math.sin(alpha), math.cos(alpha), 0.0])


def body_axes(angles: EulerAngles) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three body axes n_i = R e_i (columns of the rotation matrix)."""
    m = rotation_from_euler(angles)
    return (m[:, 0].copy(), m[:, 1].copy(), m[:, 2].copy())


def sample_uniform_orientation(rng: np.random.Generator) -> EulerAngles:
    """Draw Haar-uniform Euler angles.

    alpha, gamma ~ U[0, 2*pi) and cos(beta) ~ U[-1, 1].  Exactly three
    uniform variates are consumed, in that order.
    """
    alpha = rng.uniform(0.0, TWO_PI)
    cos_beta = rng.uniform(-1.0, 1.0)
    gamma = rng.uniform(0.0, TWO_PI)
    return EulerAngles(alpha, math.acos(min(1.0, max(-1.0, cos_beta))), gamma)


def sample_uniform_rotations(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` Haar-uniform rotation matrices, shape (n, 3, 3).

    Consumes the generator stream exactly like ``n`` successive calls of
    :func:`sample_uniform_orientation`, so scalar and vectorized sampling
    are interchangeable under a fixed seed.
    """
    u = rng.random((n, 3))
    alpha = TWO_PI * u[:, 0]
    cos_beta = 2.0 * u[:, 1] - 1.0
    gamma = TWO_PI * u[:, 2]
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb = cos_beta
    sb = np.sqrt(np.clip(1.0 - cb * cb, 0.0, None))
    cg, sg = np.cos(gamma), np.sin(gamma)
    out = np.empty((n, 3, 3))
    out[:, 0, 0] = ca * cb * cg - sa * sg
    out[:, 0, 1] = -ca * cb * sg - sa * cg
    out[:, 0, 2] = ca * sb
    out[:, 1, 0] = sa * cb * cg + ca * sg
    out[:, 1, 1] = -sa * cb * sg + ca * cg
    out[:, 1, 2] = sa * sb
    out[:, 2, 0] = -sb * cg
    out[:, 2, 1] = sb * sg
    out[:, 2, 2] = cb
    return out


def skew(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix [v]_x with [v]_x @ u = v x u."""
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def rotation_about_axis(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rotation by ``angle`` about a (not necessarily unit) ``axis``."""
    axis = np.asarray(axis, dtype=float)
    norm = float(np.linalg.norm(axis))
    if norm == 0.0:
        raise ValueError("rotation axis must be nonzero")
    return rotvec_to_matrix(axis * (angle / norm))


def rotvec_to_matrix(vec: np.ndarray) -> np.ndarray:
    """Exponential map: rotation matrix for the rotation vector ``vec``.

    Rodrigues form exp([w]_x) = 1 + a [w]_x + b [w]_x^2 with a = sin(t)/t and
    b = (1 - cos t)/t^2; series expansions below t^2 < 1e-16 where the ratios
    lose accuracy.
    """
    w = np.asarray(vec, dtype=float)
    t2 = float(w @ w)
    if t2 < 1e-16:
        a = 1.0 - t2 / 6.0
        b = 0.5 - t2 / 24.0
    else:
        t = math.sqrt(t2)
        a = math.sin(t) / t
        b = (1.0 - math.cos(t)) / t2
    k = skew(w)
    return np.eye(3) + a * k + b * (np.outer(w, w) - t2 * np.eye(3))


def reorthonormalize(matrix: np.ndarray) -> np.ndarray:
    """Project a drifted matrix onto the nearest rotation.

    Polar decomposition m = R S with S = (m^T m)^(1/2) computed from the
    symmetric 3x3 eigenproblem; R = m S^(-1) is the closest orthogonal matrix
    in the Frobenius norm.  Intended for drift-control of integrated
    rotations (callers should stay within ~0.1 of SO(3)).

    Raises ValueError when det(m) <= 0, i.e. the input is on the wrong side
    of the orthogonal group or singular.
    """
    m = np.asarray(matrix, dtype=float)
    if np.linalg.det(m) <= 0.0:
        raise ValueError("matrix has non-positive determinant; no nearby rotation")
    vals, vecs = np.linalg.eigh(m.T @ m)
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.T
    return m @ inv_sqrt


def is_rotation(matrix: np.ndarray, tol: float = 1e-12) -> bool:
    """True when ``matrix`` is orthogonal with determinant +1 within ``tol``."""
    m = np.asarray(matrix, dtype=float)
    if m.shape != (3, 3):
        return False
    return bool(
        np.max(np.abs(m.T @ m - np.eye(3))) <= tol
        and abs(np.linalg.det(m) - 1.0) <= tol
    )
