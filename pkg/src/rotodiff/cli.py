"""Command line front end: validated JSON configs in, checksummed data out.

Every run is described by a single JSON document

    {"kind": "<runner>", "seed": 0, "output_prefix": "...", "params": {...}}

validated against a JSON Schema (printable via ``rotodiff schema``) with
per-kind parameter schemas and defaults.  ``rotodiff validate`` echoes the
canonical form of a config (defaults applied, keys sorted); ``rotodiff run``
executes it and writes its data files plus a ``manifest.json`` recording the
canonical config, package version, wall-clock time, and a SHA-256 checksum
of every emitted file.  The manifest is written last, so its presence marks
a completed run.

Given the same config and seed, runs emit byte-identical data files on any
thread count; only the manifest's wall_clock_seconds field varies.  Exit
codes: 0 success, 1 configuration problems (schema violations, unreadable
files), 2 numerical failures (momentum window truncation, quadrature that
cannot converge).  Errors are printed to stdout as one-line JSON objects.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import math
import os
import sys
import time

import jsonschema
import numpy as np

from . import __version__
from .classical import ClassicalParams, FixedInitial, HaarInitial, simulate_ensemble
from .localization import (
    AnisotropySpec,
    body_diffusion_matrix,
    localization_rate_linear,
    localization_rate_quadratic,
    localization_rates_planar,
)
from .planar import (
    GridTruncationError,
    PlanarParams,
    evolve_analytic,
    evolve_numeric,
    ground_state,
    interference_mass,
    mean_energy,
    momentum_distribution,
    packet_superposition,
    plane_wave_superposition,
    wigner_from_wavefunction,
)
from .rotation import InertiaTensor, sample_uniform_orientation
from .scattering import (
    GasParams,
    PhotonEnvironment,
    QuadratureError,
    RadialProfile,
    rayleigh_gans_diffusion,
    thermal_diffusion_constants,
)

__all__ = ["PARAMS_SCHEMAS", "full_schema", "main"]

_VECTOR3 = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 3,
    "maxItems": 3,
}
_MATRIX3 = {
    "type": "array",
    "items": _VECTOR3,
    "minItems": 3,
    "maxItems": 3,
}

PARAMS_SCHEMAS: dict[str, dict] = {
    "planar-evolve": {
        "type": "object",
        "additionalProperties": False,
        "required": ["times"],
        "properties": {
            "inertia": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
            "d1": {"type": "number", "minimum": 0, "default": 0.0},
            "d2": {"type": "number", "minimum": 0, "default": 0.0},
            "hbar": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
            "n_alpha": {"type": "integer", "minimum": 4, "default": 512},
            "m_max": {"type": "integer", "minimum": 1, "default": 128},
            "times": {
                "type": "array",
                "items": {"type": "number", "minimum": 0},
                "minItems": 1,
            },
            "n_steps": {"type": "integer", "minimum": 1, "default": 400},
            "method": {"enum": ["numeric", "analytic"], "default": "numeric"},
            "initial": {
                "type": "object",
                "additionalProperties": False,
                "default": {},
                "properties": {
                    "type": {
                        "enum": ["ground", "double-packet", "plane-waves"],
                        "default": "ground",
                    },
                    "sigma": {"type": "number", "exclusiveMinimum": 0, "default": 0.06},
                    "coefficients": {
                        "type": "object",
                        "additionalProperties": {
                            "type": "array",
                            "items": {"type": "number"},
                            "minItems": 2,
                            "maxItems": 2,
                        },
                        "default": {"2": [1.0, 0.0], "-2": [1.0, 0.0]},
                    },
                },
            },
        },
    },
    "classical-ensemble": {
        "type": "object",
        "additionalProperties": False,
        "required": ["dt", "t_final", "n_trajectories"],
        "oneOf": [{"required": ["body_diffusion"]}, {"required": ["anisotropy"]}],
        "properties": {
            "moments": {
                "type": "array",
                "items": {"type": "number", "exclusiveMinimum": 0},
                "minItems": 3,
                "maxItems": 3,
                "default": [1.0, 1.0, 1.0],
            },
            "body_diffusion": _MATRIX3,
            "anisotropy": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "amplitude": {"type": "number", "minimum": 0, "default": 0.0},
                    "axis": {**_VECTOR3, "default": [0.0, 0.0, 1.0]},
                    "b_eigenvalues": {**_VECTOR3, "default": [0.0, 0.0, 0.0]},
                },
            },
            "hbar": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
            "dt": {"type": "number", "exclusiveMinimum": 0},
            "t_final": {"type": "number", "exclusiveMinimum": 0},
            "n_trajectories": {"type": "integer", "minimum": 1},
            "n_samples": {"type": "integer", "minimum": 2, "default": 21},
            "reorthonormalize_every": {"type": "integer", "minimum": 0, "default": 100},
            "backend": {"enum": ["auto", "numpy", "cython"], "default": "auto"},
            "initial": {
                "type": "object",
                "additionalProperties": False,
                "default": {},
                "properties": {
                    "type": {"enum": ["fixed", "haar"], "default": "haar"},
                    "momentum": {**_VECTOR3, "default": [0.0, 0.0, 0.0]},
                    "rotation": {
                        **_MATRIX3,
                        "default": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                    },
                },
            },
        },
    },
    "rates": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "mode": {"enum": ["planar", "orientations"], "default": "planar"},
            "d1": {"type": "number", "minimum": 0, "default": 1.0},
            "d2": {"type": "number", "minimum": 0, "default": 0.25},
            "hbar": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
            "n_points": {"type": "integer", "minimum": 2, "default": 181},
            "n_pairs": {"type": "integer", "minimum": 1, "default": 1000},
            "amplitude": {"type": "number", "minimum": 0, "default": 1.0},
            "axis": {**_VECTOR3, "default": [0.0, 0.0, 1.0]},
            "b_eigenvalues": {**_VECTOR3, "default": [1.0, 2.0, 4.0]},
        },
    },
    "micro-gas": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "profile": {
                "type": "object",
                "additionalProperties": False,
                "default": {},
                "properties": {
                    "family": {
                        "enum": ["gaussian", "exponential", "square-well"],
                        "default": "gaussian",
                    },
                    "strength": {"type": "number", "default": 1.0},
                    "range": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
                    "r_cut": {"type": "number", "exclusiveMinimum": 0},
                },
            },
            "a1": {"type": "number", "default": 0.1},
            "a2": {"type": "number", "default": 0.1},
            "gas": {
                "type": "object",
                "additionalProperties": False,
                "default": {},
                "properties": {
                    "number_density": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
                    "mass": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
                    "temperature": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
                    "hbar": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
                    "boltzmann": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
                },
            },
            "rel_tol": {"type": "number", "exclusiveMinimum": 0, "default": 1e-8},
        },
    },
    "micro-photon": {
        "type": "object",
        "additionalProperties": False,
        "required": ["susceptibility"],
        "properties": {
            "volume": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
            "field_amplitude": {"type": "number", "default": 1.0},
            "wavenumber": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
            "susceptibility": _VECTOR3,
            "permittivity": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
            "hbar": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
        },
    },
}

_TOP_PROPERTIES = {
    "kind": {"enum": sorted(PARAMS_SCHEMAS)},
    "seed": {"type": "integer", "minimum": 0, "default": 0},
    "output_prefix": {"type": "string", "default": ""},
    "params": {"type": "object"},
}


def full_schema() -> dict:
    """Complete JSON Schema for run configurations (one branch per kind)."""
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "rotodiff run configuration",
        "type": "object",
        "additionalProperties": False,
        "required": ["kind", "params"],
        "properties": copy.deepcopy(_TOP_PROPERTIES),
        "allOf": [
            {
                "if": {"properties": {"kind": {"const": kind}}, "required": ["kind"]},
                "then": {"properties": {"params": copy.deepcopy(schema)}},
            }
            for kind, schema in sorted(PARAMS_SCHEMAS.items())
        ],
    }


def _apply_defaults(instance, schema):
    """Fill in schema defaults, depth first; returns the instance."""
    if not isinstance(schema, dict) or not isinstance(instance, dict):
        return instance
    for key, sub in schema.get("properties", {}).items():
        if key not in instance and "default" in sub:
            instance[key] = copy.deepcopy(sub["default"])
        if key in instance:
            instance[key] = _apply_defaults(instance[key], sub)
    return instance


def canonical_config(config: dict) -> dict:
    """Validate a raw config and return it with every default filled in."""
    if not isinstance(config, dict):
        raise ValueError("config must be a JSON object")
    jsonschema.validate(config, full_schema(), cls=jsonschema.Draft202012Validator)
    config = copy.deepcopy(config)
    _apply_defaults(config, {"type": "object", "properties": _TOP_PROPERTIES})
    _apply_defaults(config["params"], PARAMS_SCHEMAS[config["kind"]])
    if not config["output_prefix"]:
        config["output_prefix"] = config["kind"]
    jsonschema.validate(config, full_schema(), cls=jsonschema.Draft202012Validator)
    return config


def _fmt(value: float) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(value))


def _write_text(path: str, text: str) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(text)


def _write_json(path: str, payload: dict) -> None:
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def emit_wigner_csv(path: str, state) -> None:
    """Write a Wigner state as alpha,m,w rows: m outer, alpha inner, both
    ascending.  Angles use 12 significant digits (grid labels); weights use
    the shortest round-trip representation."""
    lines = ["alpha,m,w"]
    alpha = state.alpha
    for column, m in enumerate(state.m_values):
        col = state.values[:, column]
        m_text = str(int(m))
        lines.extend(
            f"{alpha[j]:.12g},{m_text},{_fmt(col[j])}" for j in range(alpha.size)
        )
    _write_text(path, "\n".join(lines) + "\n")


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(out_dir: str, config: dict, files: list[str], started: float) -> str:
    entries = [
        {
            "name": os.path.basename(path),
            "sha256": _sha256(path),
            "size_bytes": os.path.getsize(path),
        }
        for path in sorted(files, key=os.path.basename)
    ]
    manifest = {
        "artifact_version": __version__,
        "config": config,
        "files": entries,
        "wall_clock_seconds": time.monotonic() - started,
    }
    path = os.path.join(out_dir, "manifest.json")
    _write_json(path, manifest)
    return path


def _planar_initial(params: dict):
    initial = params["initial"]
    n_alpha = params["n_alpha"]
    m_max = params["m_max"]
    kind = initial["type"]
    if kind == "ground":
        return ground_state(n_alpha, m_max)
    if kind == "double-packet":
        return wigner_from_wavefunction(
            packet_superposition(n_alpha, initial["sigma"]), m_max
        )
    coefficients = {
        int(key): complex(value[0], value[1])
        for key, value in initial["coefficients"].items()
    }
    return wigner_from_wavefunction(
        plane_wave_superposition(coefficients, n_alpha), m_max
    )


def emit_momentum_csv(path: str, state) -> None:
    """Write the momentum marginal as m,p rows with m ascending."""
    p_m = momentum_distribution(state)
    lines = ["m,p"]
    lines.extend(f"{int(m)},{_fmt(p)}" for m, p in zip(state.m_values, p_m))
    _write_text(path, "\n".join(lines) + "\n")


def _planar_step_budget(times: list[float], n_steps: int) -> list[int]:
    """Split a total step budget over snapshot intervals, at least one step
    per interval of nonzero length (evolution always starts at t = 0)."""
    bounds = [0.0] + list(times)
    spans = [b - a for a, b in zip(bounds, bounds[1:])]
    total = times[-1]
    if total <= 0.0:
        return [0 for _ in spans]
    return [0 if span == 0.0 else max(1, round(n_steps * span / total)) for span in spans]


def _run_planar(config: dict, out_dir: str) -> list[str]:
    params = config["params"]
    model = PlanarParams(
        inertia=params["inertia"],
        d1=params["d1"],
        d2=params["d2"],
        hbar=params["hbar"],
    )
    times = params["times"]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("params.times must be non-decreasing")
    initial = _planar_initial(params)
    analytic = params["method"] == "analytic"
    budget = _planar_step_budget(times, params["n_steps"])

    prefix = config["output_prefix"]
    files: list[str] = []
    snapshots = []
    state = initial
    for index, (target, steps) in enumerate(zip(times, budget)):
        if analytic:
            state = evolve_analytic(initial, model, target) if target > 0.0 else initial
        elif steps > 0:
            state = evolve_numeric(state, model, target - state.time, steps)
        wigner_path = os.path.join(out_dir, f"{prefix}_wigner_{index:03d}.csv")
        emit_wigner_csv(wigner_path, state)
        momentum_path = os.path.join(out_dir, f"{prefix}_momentum_{index:03d}.csv")
        emit_momentum_csv(momentum_path, state)
        files += [wigner_path, momentum_path]

        p_m = momentum_distribution(state)
        m = state.m_values.astype(float)
        snapshots.append(
            {
                "edge_mass_fraction": state.edge_mass_fraction(),
                "interference_mass": interference_mass(state),
                "mean_energy": mean_energy(state, model),
                "mean_m2": float(np.sum(p_m * m * m)),
                "n_steps_used": 0 if analytic else steps,
                "time": target,
                "total_mass": state.total_mass(),
            }
        )

    summary = {
        "m_max": initial.m_max,
        "method": params["method"],
        "n_alpha": initial.n_alpha,
        "snapshots": snapshots,
    }
    summary_path = os.path.join(out_dir, f"{prefix}_summary.json")
    _write_json(summary_path, summary)
    files.append(summary_path)
    return files


def _run_classical(config: dict, out_dir: str, threads: int | None) -> list[str]:
    params = config["params"]
    inertia = InertiaTensor(moments=np.array(params["moments"]))
    if "body_diffusion" in params:
        body_diffusion = np.array(params["body_diffusion"], dtype=float)
    else:
        spec_cfg = dict(params["anisotropy"])
        _apply_defaults(
            spec_cfg, PARAMS_SCHEMAS["classical-ensemble"]["properties"]["anisotropy"]
        )
        spec = AnisotropySpec(
            amplitude=spec_cfg["amplitude"],
            axis=np.array(spec_cfg["axis"]),
            b_eigenvalues=np.array(spec_cfg["b_eigenvalues"]),
        )
        body_diffusion = body_diffusion_matrix(spec, params["hbar"])
    model = ClassicalParams(
        inertia=inertia,
        body_diffusion=body_diffusion,
        dt=params["dt"],
        seed=config["seed"],
        reorthonormalize_every=params["reorthonormalize_every"],
    )
    init_cfg = params["initial"]
    momentum = np.array(init_cfg["momentum"], dtype=float)
    if init_cfg["type"] == "fixed":
        initial = FixedInitial(
            momentum=momentum, rotation=np.array(init_cfg["rotation"], dtype=float)
        )
    else:
        initial = HaarInitial(momentum=momentum)
    backend = None if params["backend"] == "auto" else params["backend"]
    series = simulate_ensemble(
        model,
        params["n_trajectories"],
        params["t_final"],
        initial,
        n_samples=params["n_samples"],
        threads=threads,
        backend=backend,
    )

    header = ["time"]
    header += [f"mean_j{axis}" for axis in "xyz"]
    header += [f"se_j{axis}" for axis in "xyz"]
    header += [f"jj_{a}{b}" for a in "xyz" for b in "xyz"]
    header += [f"se_jj_{a}{b}" for a in "xyz" for b in "xyz"]
    lines = [",".join(header)]
    for i, t in enumerate(series.times):
        row = [_fmt(t)]
        row += [_fmt(v) for v in series.mean_momentum[i]]
        row += [_fmt(v) for v in series.stderr_mean[i]]
        row += [_fmt(v) for v in series.second_moment[i].ravel()]
        row += [_fmt(v) for v in series.stderr_second[i].ravel()]
        lines.append(",".join(row))
    prefix = config["output_prefix"]
    moments_path = os.path.join(out_dir, f"{prefix}_moments.csv")
    _write_text(moments_path, "\n".join(lines) + "\n")

    summary = {
        "backend": params["backend"],
        "final_mean_momentum": series.mean_momentum[-1].tolist(),
        "final_second_moment": series.second_moment[-1].tolist(),
        "n_samples": int(series.times.size),
        "n_trajectories": series.n_trajectories,
    }
    summary_path = os.path.join(out_dir, f"{prefix}_summary.json")
    _write_json(summary_path, summary)
    return [moments_path, summary_path]


def _run_rates(config: dict, out_dir: str) -> list[str]:
    params = config["params"]
    prefix = config["output_prefix"]
    path = os.path.join(out_dir, f"{prefix}_rates.csv")
    if params["mode"] == "planar":
        lines = ["alpha,f_lin,f_quad"]
        for alpha in np.linspace(0.0, 2.0 * math.pi, params["n_points"]):
            f_lin, f_quad = localization_rates_planar(
                params["d1"], params["d2"], alpha, 0.0, params["hbar"]
            )
            lines.append(f"{alpha:.12g},{_fmt(f_lin)},{_fmt(f_quad)}")
    else:
        spec = AnisotropySpec(
            amplitude=params["amplitude"],
            axis=np.array(params["axis"]),
            b_eigenvalues=np.array(params["b_eigenvalues"]),
        )
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(config["seed"])))
        lines = ["f_lin,f_quad"]
        for _ in range(params["n_pairs"]):
            omega = sample_uniform_orientation(rng)
            omega_prime = sample_uniform_orientation(rng)
            f_lin = localization_rate_linear(spec, omega, omega_prime, params["hbar"])
            f_quad = localization_rate_quadratic(spec, omega, omega_prime, params["hbar"])
            lines.append(f"{_fmt(f_lin)},{_fmt(f_quad)}")
    _write_text(path, "\n".join(lines) + "\n")
    return [path]


def _profile_from_config(profile_cfg: dict) -> RadialProfile:
    family = profile_cfg["family"]
    strength = profile_cfg["strength"]
    scale = profile_cfg["range"]
    if family == "gaussian":
        fn = lambda r, s=strength, w=scale: s * np.exp(-(r * r) / (2.0 * w * w))
        default_cut, decay = 6.0 * scale, "gaussian"
    elif family == "exponential":
        fn = lambda r, s=strength, w=scale: s * np.exp(-r / w)
        default_cut, decay = 12.0 * scale, "exponential"
    else:
        fn = lambda r, s=strength, w=scale: s * np.where(np.asarray(r) <= w, 1.0, 0.0)
        default_cut, decay = scale, "compact"
    return RadialProfile(
        fn=fn, r_cut=profile_cfg.get("r_cut", default_cut), decay=decay
    )


def _run_micro_gas(config: dict, out_dir: str) -> list[str]:
    params = config["params"]
    profile = _profile_from_config(params["profile"])
    gas_cfg = params["gas"]
    gas = GasParams(
        number_density=gas_cfg["number_density"],
        mass=gas_cfg["mass"],
        temperature=gas_cfg["temperature"],
        hbar=gas_cfg["hbar"],
        boltzmann=gas_cfg["boltzmann"],
    )
    d1, d2 = thermal_diffusion_constants(
        profile, params["a1"], params["a2"], gas, rel_tol=params["rel_tol"]
    )
    path = os.path.join(out_dir, f"{config['output_prefix']}_rates.json")
    _write_json(path, {"a1": params["a1"], "a2": params["a2"], "d1": d1, "d2": d2})
    return [path]


def _run_micro_photon(config: dict, out_dir: str) -> list[str]:
    params = config["params"]
    env = PhotonEnvironment(
        volume=params["volume"],
        field_amplitude=params["field_amplitude"],
        wavenumber=params["wavenumber"],
        susceptibility=np.array(params["susceptibility"]),
        permittivity=params["permittivity"],
        hbar=params["hbar"],
    )
    d2 = rayleigh_gans_diffusion(env)
    path = os.path.join(out_dir, f"{config['output_prefix']}_rates.json")
    _write_json(path, {"d2": d2.tolist()})
    return [path]


_RUNNERS = {
    "planar-evolve": lambda config, out_dir, threads: _run_planar(config, out_dir),
    "classical-ensemble": _run_classical,
    "rates": lambda config, out_dir, threads: _run_rates(config, out_dir),
    "micro-gas": lambda config, out_dir, threads: _run_micro_gas(config, out_dir),
    "micro-photon": lambda config, out_dir, threads: _run_micro_photon(config, out_dir),
}


def _load_config(path: str) -> dict:
    with open(path, "r") as handle:
        return json.load(handle)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotodiff",
        description="Rotational decoherence and momentum diffusion runners.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a run configuration")
    run.add_argument("config", help="path to the JSON run configuration")
    run.add_argument("--out", default=".", help="output directory (created if missing)")
    run.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads for ensemble runs (default: ROTODIFF_THREADS or 1)",
    )
    run.add_argument(
        "--seed", type=int, default=None, help="override the seed in the config"
    )

    validate = sub.add_parser("validate", help="check a config and print its canonical form")
    validate.add_argument("config", help="path to the JSON run configuration")

    sub.add_parser("schema", help="print the configuration JSON Schema")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        print(json.dumps(full_schema(), sort_keys=True, indent=2))
        return 0
    try:
        config = canonical_config(_load_config(args.config))
    except (OSError, ValueError, KeyError, TypeError, jsonschema.ValidationError) as exc:
        message = getattr(exc, "message", None) or str(exc)
        print(json.dumps({"error": {"type": "config", "message": message}}))
        return 1
    if args.command == "validate":
        print(json.dumps(config, sort_keys=True, indent=2))
        return 0

    if args.seed is not None:
        config["seed"] = int(args.seed)
    started = time.monotonic()
    try:
        os.makedirs(args.out, exist_ok=True)
        files = _RUNNERS[config["kind"]](config, args.out, args.threads)
        manifest_path = _write_manifest(args.out, config, files, started)
    except (GridTruncationError, QuadratureError, FloatingPointError) as exc:
        print(json.dumps({"error": {"type": "numerical", "message": str(exc)}}))
        return 2
    except (OSError, ValueError) as exc:
        print(json.dumps({"error": {"type": "config", "message": str(exc)}}))
        return 1
    print(json.dumps({"manifest": manifest_path, "status": "ok"}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
