"""Quantum and classical angular momentum diffusion of rigid rotors.

The package follows one mechanism through four levels of description:

* :mod:`rotodiff.rotation` - orientation bookkeeping: Euler angles in the
  z-y'-z'' convention, rotation matrices, Haar sampling, the exponential
  map and a polar projection back onto the rotation group.
* :mod:`rotodiff.localization` - the orientational decoherence rates and
  diffusion tensors generated by a linear (vector) and a quadratic
  (tensor) environment coupling.
* :mod:`rotodiff.classical` - Langevin trajectories of the matching
  classical process, with a compiled kernel and a numpy fallback.
* :mod:`rotodiff.planar` - exact and split-step evolution of the planar
  rotor's Wigner function, plus coherence diagnostics.
* :mod:`rotodiff.scattering` - microscopic input: Born amplitudes, their
  vector/tensor couplings, thermal-gas averages and the light-scattering
  closed form.
* :mod:`rotodiff.cli` - JSON-configured command line runners with
  checksummed, reproducible outputs.
"""

__version__ = "0.1.0"

from . import classical, localization, planar, rotation, scattering
from .classical import (
    ClassicalParams,
    FixedInitial,
    HaarInitial,
    MomentSeries,
    RigidBodyState,
    available_backends,
    simulate_ensemble,
)
from .localization import (
    AnisotropySpec,
    DiffusionCoefficients,
    diffusion_constants,
    localization_rate_linear,
    localization_rate_quadratic,
    localization_rates_planar,
    localization_rates_symmetric,
)
from .planar import (
    GridTruncationError,
    PlanarParams,
    PlanarWignerState,
    evolve_analytic,
    evolve_numeric,
    ground_state,
    wigner_from_wavefunction,
)
from .rotation import EulerAngles, InertiaTensor, rotation_from_euler
from .scattering import GasParams, PhotonEnvironment, QuadratureError, RadialProfile

__all__ = [
    "AnisotropySpec",
    "ClassicalParams",
    "DiffusionCoefficients",
    "EulerAngles",
    "FixedInitial",
    "GasParams",
    "GridTruncationError",
    "HaarInitial",
    "InertiaTensor",
    "MomentSeries",
    "PhotonEnvironment",
    "PlanarParams",
    "PlanarWignerState",
    "QuadratureError",
    "RadialProfile",
    "RigidBodyState",
    "__version__",
    "available_backends",
    "classical",
    "diffusion_constants",
    "evolve_analytic",
    "evolve_numeric",
    "ground_state",
    "localization",
    "localization_rate_linear",
    "localization_rate_quadratic",
    "localization_rates_planar",
    "localization_rates_symmetric",
    "planar",
    "rotation",
    "rotation_from_euler",
    "scattering",
    "simulate_ensemble",
    "wigner_from_wavefunction",
]
