"""Classical orientation-dependent angular momentum diffusion.

Integrates the Langevin dynamics of a rigid rotor whose space-fixed angular
momentum J receives isotropically oriented but orientation-dependent kicks:

    dJ = sqrt(2 D(Omega)) dW,      D(Omega) = R D0 R^T,
    dR = [I(Omega)^-1 J]_x R dt,

with D0 the body-frame diffusion tensor (see
:func:`rotodiff.localization.body_diffusion_matrix`) and I(Omega) the
orientation-resolved inertia tensor.  The Euler-Maruyama step evaluates both
the noise amplitude and the angular velocity at the step start, updates J,
then moves R along the exponential map.  Consequences used by the tests:
<J> is constant and d<J (x) J>/dt = 2 <D(Omega)> over the ensemble.

Two interchangeable trajectory backends exist: a compiled Cython kernel
(preferred) and a vectorized numpy fallback, selected at import.  Both
consume identical per-trajectory noise streams (counter-based Philox
substreams spawned from the run seed), so results are reproducible per
backend regardless of chunking or thread count.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _langevin_np
from .localization import AnisotropySpec, body_diffusion_matrix
from .rotation import InertiaTensor, rotvec_to_matrix, sample_uniform_rotations

try:
    from . import _langevin_cy
except ImportError:  # pragma: no cover - exercised only on builds without a compiler
    _langevin_cy = None

__all__ = [
    "ClassicalParams",
    "FixedInitial",
    "HaarInitial",
    "MomentSeries",
    "RigidBodyState",
    "available_backends",
    "default_backend",
    "diffusion_at",
    "matrix_sqrt_psd",
    "sde_step",
    "simulate_ensemble",
]

_EIG_CLAMP = -1e-12
_EIG_ERROR = -1e-9
_CHUNK_BYTES = 32 * 1024 * 1024  # noise-array budget per chunk


def available_backends() -> tuple[str, ...]:
    """Names of the usable trajectory backends, fastest first."""
    if _langevin_cy is not None:
        return ("cython", "numpy")
    return ("numpy",)


def default_backend() -> str:
    return available_backends()[0]


def _kernel(backend: str | None):
    name = backend if backend is not None else default_backend()
    if name == "cython":
        if _langevin_cy is None:
            raise ValueError("cython backend requested but the extension is not built")
        return _langevin_cy
    if name == "numpy":
        return _langevin_np
    raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")


def matrix_sqrt_psd(matrix: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via the symmetric eigenproblem.

    Eigenvalues in [-1e-12, 0) are clamped to zero (roundoff of a PSD
    input); anything below -1e-9 is treated as genuinely indefinite and
    raises ValueError.
    """
    m = np.asarray(matrix, dtype=float)
    if m.shape != (m.shape[0], m.shape[0]) or not np.allclose(m, m.T, atol=1e-10):
        raise ValueError("matrix_sqrt_psd requires a symmetric matrix")
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    if vals.min() < _EIG_ERROR:
        raise ValueError(f"matrix is not PSD: smallest eigenvalue {vals.min():.3e}")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


@dataclass(frozen=True)
class ClassicalParams:
    """Inputs of a classical diffusion run.

    body_diffusion is the body-frame diffusion tensor D0 (symmetric PSD);
    the noise amplitude sqrt(2 D0) is precomputed once, and per step
    rotated to sqrt(2 D(Omega)) = R sqrt(2 D0) R^T.
    """

    inertia: InertiaTensor
    body_diffusion: np.ndarray
    dt: float
    seed: int
    reorthonormalize_every: int = 100

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.reorthonormalize_every < 0:
            raise ValueError("reorthonormalize_every must be >= 0")
        d0 = np.asarray(self.body_diffusion, dtype=float).reshape(3, 3).copy()
        # validates symmetry and the PSD clamp policy
        matrix_sqrt_psd(d0)
        object.__setattr__(self, "body_diffusion", d0)
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def from_spec(
        cls,
        inertia: InertiaTensor,
        spec: AnisotropySpec,
        dt: float,
        seed: int,
        hbar: float = 1.0,
        reorthonormalize_every: int = 100,
    ) -> "ClassicalParams":
        return cls(
            inertia=inertia,
            body_diffusion=body_diffusion_matrix(spec, hbar),
            dt=dt,
            seed=seed,
            reorthonormalize_every=reorthonormalize_every,
        )

    @property
    def noise_amplitude_body(self) -> np.ndarray:
        return matrix_sqrt_psd(2.0 * self.body_diffusion)


@dataclass(frozen=True)
class RigidBodyState:
    """Orientation matrix, space-fixed angular momentum, elapsed time."""

    rotation: np.ndarray
    momentum: np.ndarray
    time: float = 0.0


@dataclass(frozen=True)
class FixedInitial:
    """Every trajectory starts from the same rotation and momentum."""

    momentum: np.ndarray
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def sample(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array(self.rotation, dtype=float),
            np.array(self.momentum, dtype=float),
        )


@dataclass(frozen=True)
class HaarInitial:
    """Haar-uniform orientation with a fixed initial momentum vector."""

    momentum: np.ndarray

    def sample(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        rot = sample_uniform_rotations(1, rng)[0]
        return rot, np.array(self.momentum, dtype=float)


@dataclass(frozen=True)
class MomentSeries:
    """Ensemble moments of J at the sampled times.

    second_moment[t] is the raw matrix <J (x) J>; standard errors are
    per-entry (std over trajectories / sqrt(n)).
    """

    times: np.ndarray
    mean_momentum: np.ndarray
    second_moment: np.ndarray
    stderr_mean: np.ndarray
    stderr_second: np.ndarray
    n_trajectories: int


def diffusion_at(params: ClassicalParams, rotation: np.ndarray) -> np.ndarray:
    """Space-fixed diffusion tensor at one orientation, R D0 R^T."""
    r = np.asarray(rotation, dtype=float)
    return r @ params.body_diffusion @ r.T


def sde_step(
    state: RigidBodyState,
    params: ClassicalParams,
    rng: np.random.Generator,
    *,
    reorthonormalize: bool = False,
) -> RigidBodyState:
    """One Euler-Maruyama step of the coupled (J, R) dynamics.

    Draws a standard normal 3-vector, kicks J with amplitude
    sqrt(2 D(Omega)) sqrt(dt), and rotates R by the step-start angular
    velocity.  Warns when |omega| dt >= 0.1 rad (shrink dt).  Ensemble
    drivers apply the polar projection every
    ``params.reorthonormalize_every`` steps; pass ``reorthonormalize=True``
    to apply it here.
    """
    rot = np.asarray(state.rotation, dtype=float)
    amp = rot @ params.noise_amplitude_body @ rot.T
    omega = rot @ params.inertia.body_inverse @ rot.T @ state.momentum
    angle = float(np.linalg.norm(omega)) * params.dt
    if angle >= 0.1:
        warnings.warn(
            f"|omega| dt = {angle:.3f} rad >= 0.1; decrease dt for a faithful "
            "orientation update",
            stacklevel=2,
        )
    xi = rng.standard_normal(3)
    momentum = state.momentum + math.sqrt(params.dt) * (amp @ xi)
    rotation = rotvec_to_matrix(omega * params.dt) @ rot
    if reorthonormalize:
        from .rotation import reorthonormalize as _reorth

        rotation = _reorth(rotation)
    return RigidBodyState(rotation=rotation, momentum=momentum, time=state.time + params.dt)


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("ROTODIFF_THREADS", "")
        threads = int(env) if env.strip() else 1
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return threads


def simulate_ensemble(
    params: ClassicalParams,
    n_trajectories: int,
    t_final: float,
    initial: FixedInitial | HaarInitial,
    n_samples: int = 21,
    sample_times: np.ndarray | None = None,
    threads: int | None = None,
    backend: str | None = None,
    return_paths: bool = False,
) -> MomentSeries | tuple[MomentSeries, np.ndarray]:
    """Integrate an ensemble and reduce it to moment series.

    Each trajectory owns the Philox substream spawned from
    (params.seed, trajectory index); initial conditions and noise are drawn
    from that stream in a fixed order, so results do not depend on chunking
    or thread scheduling.  The reduction over trajectories is a fixed-shape
    numpy sum, deterministic for a given trajectory count.

    With ``return_paths=True`` also returns the raw J samples, shape
    (n_trajectories, n_times, 3), for per-trajectory statistics.
    """
    if n_trajectories < 1:
        raise ValueError("n_trajectories must be >= 1")
    if t_final <= 0.0:
        raise ValueError("t_final must be positive")
    kernel = _kernel(backend)
    threads = _resolve_threads(threads)

    n_steps = max(1, int(round(t_final / params.dt)))
    if not math.isclose(n_steps * params.dt, t_final, rel_tol=1e-9, abs_tol=1e-12):
        warnings.warn(
            f"t_final adjusted to {n_steps * params.dt!r} ({n_steps} steps of dt={params.dt})",
            stacklevel=2,
        )
    if sample_times is None:
        steps = np.unique(np.round(np.linspace(0, n_steps, n_samples)).astype(np.int64))
    else:
        steps = np.asarray(
            [int(round(t / params.dt)) for t in np.asarray(sample_times, dtype=float)],
            dtype=np.int64,
        )
        if np.any(steps < 0) or np.any(steps > n_steps) or len(np.unique(steps)) != len(steps):
            raise ValueError("sample_times must be distinct multiples of dt within [0, t_final]")
    times = steps.astype(float) * params.dt
    n_out = len(steps)

    amp_body = params.noise_amplitude_body
    inv_inertia = params.inertia.body_inverse
    out_mom = np.empty((n_trajectories, n_out, 3))
    out_rot_final = np.empty((n_trajectories, 3, 3))
    out_mom_final = np.empty((n_trajectories, 3))

    seed_children = np.random.SeedSequence(params.seed).spawn(n_trajectories)
    chunk = max(1, min(n_trajectories, _CHUNK_BYTES // (24 * n_steps)))
    spans = [(lo, min(lo + chunk, n_trajectories)) for lo in range(0, n_trajectories, chunk)]

    max_angle = 0.0

    def _run_span(span: tuple[int, int]) -> float:
        lo, hi = span
        n = hi - lo
        rot0 = np.empty((n, 3, 3))
        mom0 = np.empty((n, 3))
        noise = np.empty((n, n_steps, 3))
        for i in range(n):
            gen = np.random.Generator(np.random.Philox(seed_children[lo + i]))
            rot0[i], mom0[i] = initial.sample(gen)
            noise[i] = gen.standard_normal((n_steps, 3))
        omega0 = np.einsum("nij,nj->ni", rot0, np.einsum("ij,nj->ni", inv_inertia, np.einsum("nji,nj->ni", rot0, mom0)))
        kernel.run_paths(
            rot0,
            mom0,
            amp_body,
            inv_inertia,
            params.dt,
            n_steps,
            steps,
            params.reorthonormalize_every,
            noise,
            out_mom[lo:hi],
            out_rot_final[lo:hi],
            out_mom_final[lo:hi],
        )
        return float(np.max(np.linalg.norm(omega0, axis=1))) * params.dt

    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            max_angle = max(pool.map(_run_span, spans))
    else:
        for span in spans:
            max_angle = max(max_angle, _run_span(span))
    if max_angle >= 0.1:
        warnings.warn(
            f"initial |omega| dt = {max_angle:.3f} rad >= 0.1; decrease dt",
            stacklevel=2,
        )

    mean = out_mom.mean(axis=0)
    stderr_mean = out_mom.std(axis=0, ddof=1) / math.sqrt(n_trajectories) if n_trajectories > 1 else np.zeros_like(mean)
    prods = np.einsum("nti,ntj->ntij", out_mom, out_mom)
    second = prods.mean(axis=0)
    stderr_second = (
        prods.std(axis=0, ddof=1) / math.sqrt(n_trajectories)
        if n_trajectories > 1
        else np.zeros_like(second)
    )
    series = MomentSeries(
        times=times,
        mean_momentum=mean,
        second_moment=second,
        stderr_mean=stderr_mean,
        stderr_second=stderr_second,
        n_trajectories=n_trajectories,
    )
    if return_paths:
        return series, out_mom
    return series
