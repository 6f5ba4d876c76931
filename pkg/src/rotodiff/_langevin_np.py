"""Vectorized numpy integrator for the rigid-rotor Langevin dynamics.

Reference implementation of the trajectory kernel.  The compiled backend
(_langevin_cy) mirrors this file operation for operation: same update order,
same association of sums, same branch predicate for the small-angle series,
consuming an identical pre-drawn noise array.  Keep the two in sync.

Per step, from state (R, J) at the step start:

    S     = R @ noise_amp_body @ R^T          (noise amplitude, = sqrt(2 D))
    omega = R @ inv_inertia_body @ R^T @ J
    J    <- J + sqrt(dt) * S @ xi
    R    <- exp([omega * dt]_x) @ R

with a Newton polar projection of R every ``reorth_every`` steps.
"""

from __future__ import annotations

import numpy as np

_SMALL_ANGLE_SQ = 1e-16  # branch predicate shared with the compiled kernel
_POLAR_ITERATIONS = 3


def _matmul_bodyright(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched (n,3,3) @ (3,3), sums associated left to right."""
    out = np.empty_like(a)
    for i in range(3):
        for j in range(3):
            out[:, i, j] = (
                a[:, i, 0] * b[0, j] + a[:, i, 1] * b[1, j]
            ) + a[:, i, 2] * b[2, j]
    return out


def _matmul_transposed(a: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Batched a @ r^T for (n,3,3) operands."""
    out = np.empty_like(a)
    for i in range(3):
        for j in range(3):
            out[:, i, j] = (
                a[:, i, 0] * r[:, j, 0] + a[:, i, 1] * r[:, j, 1]
            ) + a[:, i, 2] * r[:, j, 2]
    return out


def _matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched (n,3,3) @ (n,3,3)."""
    out = np.empty_like(a)
    for i in range(3):
        for j in range(3):
            out[:, i, j] = (
                a[:, i, 0] * b[:, 0, j] + a[:, i, 1] * b[:, 1, j]
            ) + a[:, i, 2] * b[:, 2, j]
    return out


def _matvec(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Batched (n,3,3) @ (n,3)."""
    out = np.empty_like(v)
    for i in range(3):
        out[:, i] = (a[:, i, 0] * v[:, 0] + a[:, i, 1] * v[:, 1]) + a[:, i, 2] * v[:, 2]
    return out


def _matvec_transposed(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Batched a^T @ v."""
    out = np.empty_like(v)
    for i in range(3):
        out[:, i] = (a[:, 0, i] * v[:, 0] + a[:, 1, i] * v[:, 1]) + a[:, 2, i] * v[:, 2]
    return out


def _matvec_body(b: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Batched (3,3) @ (n,3)."""
    out = np.empty_like(v)
    for i in range(3):
        out[:, i] = (b[i, 0] * v[:, 0] + b[i, 1] * v[:, 1]) + b[i, 2] * v[:, 2]
    return out


def _rotation_increment(w: np.ndarray) -> np.ndarray:
    """Batched Rodrigues map exp([w]_x) for rotation vectors w, shape (n,3)."""
    w0, w1, w2 = w[:, 0], w[:, 1], w[:, 2]
    t2 = (w0 * w0 + w1 * w1) + w2 * w2
    small = t2 < _SMALL_ANGLE_SQ
    t_safe = np.sqrt(np.where(small, 1.0, t2))
    a = np.where(small, 1.0 - t2 / 6.0, np.sin(t_safe) / t_safe)
    b = np.where(small, 0.5 - t2 / 24.0, (1.0 - np.cos(t_safe)) / np.where(small, 1.0, t2))
    out = np.empty((w.shape[0], 3, 3))
    out[:, 0, 0] = 1.0 + b * (w0 * w0 - t2)
    out[:, 0, 1] = a * (-w2) + b * (w0 * w1)
    out[:, 0, 2] = a * w1 + b * (w0 * w2)
    out[:, 1, 0] = a * w2 + b * (w1 * w0)
    out[:, 1, 1] = 1.0 + b * (w1 * w1 - t2)
    out[:, 1, 2] = a * (-w0) + b * (w1 * w2)
    out[:, 2, 0] = a * (-w1) + b * (w2 * w0)
    out[:, 2, 1] = a * w0 + b * (w2 * w1)
    out[:, 2, 2] = 1.0 + b * (w2 * w2 - t2)
    return out


def _polar_project(x: np.ndarray) -> np.ndarray:
    """Newton iteration X <- (X + X^-T)/2 toward the orthogonal polar factor.

    Fixed iteration count; quadratic convergence makes three passes reach
    machine precision from the small drift accumulated over 100 steps.
    """
    for _ in range(_POLAR_ITERATIONS):
        c00 = x[:, 1, 1] * x[:, 2, 2] - x[:, 1, 2] * x[:, 2, 1]
        c01 = x[:, 1, 2] * x[:, 2, 0] - x[:, 1, 0] * x[:, 2, 2]
        c02 = x[:, 1, 0] * x[:, 2, 1] - x[:, 1, 1] * x[:, 2, 0]
        c10 = x[:, 0, 2] * x[:, 2, 1] - x[:, 0, 1] * x[:, 2, 2]
        c11 = x[:, 0, 0] * x[:, 2, 2] - x[:, 0, 2] * x[:, 2, 0]
        c12 = x[:, 0, 1] * x[:, 2, 0] - x[:, 0, 0] * x[:, 2, 1]
        c20 = x[:, 0, 1] * x[:, 1, 2] - x[:, 0, 2] * x[:, 1, 1]
        c21 = x[:, 0, 2] * x[:, 1, 0] - x[:, 0, 0] * x[:, 1, 2]
        c22 = x[:, 0, 0] * x[:, 1, 1] - x[:, 0, 1] * x[:, 1, 0]
        det = (x[:, 0, 0] * c00 + x[:, 0, 1] * c01) + x[:, 0, 2] * c02
        nxt = np.empty_like(x)
        nxt[:, 0, 0] = 0.5 * (x[:, 0, 0] + c00 / det)
        nxt[:, 0, 1] = 0.5 * (x[:, 0, 1] + c01 / det)
        nxt[:, 0, 2] = 0.5 * (x[:, 0, 2] + c02 / det)
        nxt[:, 1, 0] = 0.5 * (x[:, 1, 0] + c10 / det)
        nxt[:, 1, 1] = 0.5 * (x[:, 1, 1] + c11 / det)
        nxt[:, 1, 2] = 0.5 * (x[:, 1, 2] + c12 / det)
        nxt[:, 2, 0] = 0.5 * (x[:, 2, 0] + c20 / det)
        nxt[:, 2, 1] = 0.5 * (x[:, 2, 1] + c21 / det)
        nxt[:, 2, 2] = 0.5 * (x[:, 2, 2] + c22 / det)
        x = nxt
    return x


def run_paths(
    rot0: np.ndarray,
    mom0: np.ndarray,
    noise_amp_body: np.ndarray,
    inv_inertia_body: np.ndarray,
    dt: float,
    n_steps: int,
    sample_steps: np.ndarray,
    reorth_every: int,
    noise: np.ndarray,
    out_mom: np.ndarray,
    out_rot_final: np.ndarray,
    out_mom_final: np.ndarray,
) -> None:
    """Integrate a batch of trajectories, recording J at the sampled steps.

    rot0, mom0        initial rotations (n,3,3) and momenta (n,3); not mutated.
    noise_amp_body    body-frame noise amplitude sqrt(2 D0), symmetric (3,3).
    inv_inertia_body  body-frame inverse inertia, symmetric (3,3).
    sample_steps      sorted step counts at which to record J (0 = initial).
    noise             standard normals, shape (n, n_steps, 3).
    out_mom           (n, len(sample_steps), 3), filled with J samples.
    out_rot_final     (n, 3, 3), final rotations.
    out_mom_final     (n, 3), final momenta.
    """
    rot = rot0.copy()
    mom = mom0.copy()
    sqdt = np.sqrt(dt)
    slot_of_step = {int(s): k for k, s in enumerate(sample_steps)}
    if 0 in slot_of_step:
        out_mom[:, slot_of_step[0], :] = mom
    for step in range(1, n_steps + 1):
        xi = noise[:, step - 1, :]
        tmp = _matmul_bodyright(rot, noise_amp_body)
        amp = _matmul_transposed(tmp, rot)
        body_mom = _matvec_transposed(rot, mom)
        body_omega = _matvec_body(inv_inertia_body, body_mom)
        w = _matvec(rot, body_omega) * dt
        mom = mom + sqdt * _matvec(amp, xi)
        rot = _matmul(_rotation_increment(w), rot)
        if reorth_every > 0 and step % reorth_every == 0:
            rot = _polar_project(rot)
        k = slot_of_step.get(step)
        if k is not None:
            out_mom[:, k, :] = mom
    out_rot_final[...] = rot
    out_mom_final[...] = mom
