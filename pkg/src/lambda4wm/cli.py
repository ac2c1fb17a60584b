"""Command-line entry point with reproducible, file-based inputs and outputs.

Every subcommand takes ``--config <json>`` and ``--out <dir>``; each run
writes its products plus a ``manifest.json`` recording the merged
configuration, tool version, file names and wall-clock duration, enough to
re-run the job. CSV output is UTF-8, comma-separated, '.' decimal,
scientific notation with 17 significant digits, so identical config and
version give byte-identical tables.

Exit codes: 0 success, 1 validation/configuration error, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .doppler import DopplerConfig, averaged_susceptibilities, sigma_v
from .params import ModelParams, ParameterError, build_params, kinematics
from .propagation import NonFiniteFieldError, coupling, integrate_ode, solve_closed_form
from .steadystate import (ConvergenceError, SeedNonlinearityError,
                          evolve_to_steady_state, extract_susceptibilities)
from .susceptibility import susceptibilities
from .sweepfit import (DataFormatError, FIT_PARAMETERS, fit_model, gain_map,
                       load_gain_data, solve_twin_beam)

ENV_THREADS = "LAMBDA4WM_THREADS"
SUBCOMMANDS = ("chi", "propagate", "gainmap", "doppler-gain", "fit", "oracle")


class ConfigError(ValueError):
    """Bad or missing configuration input."""


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(p, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return doc


def _params_from(config: dict) -> ModelParams:
    block = config.get("params")
    if not isinstance(block, dict):
        raise ConfigError('config must contain a "params" object')
    return build_params(block)


def _doppler_from(config: dict):
    block = config.get("doppler")
    if block is None:
        return None
    try:
        return DopplerConfig(**block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad doppler block: {exc}") from exc


def _axis_from(config: dict, key: str) -> np.ndarray:
    spec = config.get(key)
    if spec is None:
        raise ConfigError(f'config must contain "{key}"')
    if isinstance(spec, list):
        values = np.asarray(spec, dtype=float)
    elif isinstance(spec, dict):
        try:
            values = np.linspace(float(spec["min"]), float(spec["max"]),
                                 int(spec["points"]))
        except KeyError as exc:
            raise ConfigError(f'"{key}" axis needs min/max/points') from exc
    else:
        raise ConfigError(f'"{key}" must be a list or a min/max/points object')
    if values.size == 0:
        raise ConfigError(f'"{key}" axis is empty')
    return values


def _scalar_from(config: dict, key: str, default=None) -> float:
    if key not in config:
        if default is None:
            raise ConfigError(f'config must contain "{key}"')
        return default
    value = config[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f'"{key}" must be a number')
    return float(value)


# ---------------------------------------------------------------------------
# subcommand bodies; each returns the list of files written (besides manifest)
# ---------------------------------------------------------------------------

def _run_chi(config, out_dir, threads):
    params = _params_from(config)
    delta = _axis_from(config, "delta_gamma")
    dop = _doppler_from(config)
    theta = np.deg2rad(_scalar_from(config, "theta_deg", 0.0))
    if dop is not None and dop.enabled:
        kin = kinematics(params, float(delta[0]), theta)
        chi = averaged_susceptibilities(params, delta, kin, dop)
    else:
        chi = susceptibilities(params, delta)
    rows = np.column_stack([
        delta,
        np.real(chi.chi_pp), np.imag(chi.chi_pp),
        np.real(chi.chi_cc), np.imag(chi.chi_cc),
        np.real(chi.chi_pc), np.imag(chi.chi_pc),
        np.real(chi.chi_cp), np.imag(chi.chi_cp),
    ])
    write_csv(out_dir / "chi.csv",
              ["delta_gamma",
               "re_chi_pp", "im_chi_pp", "re_chi_cc", "im_chi_cc",
               "re_chi_pc", "im_chi_pc", "re_chi_cp", "im_chi_cp"],
              rows)
    return ["chi.csv"]


def _run_propagate(config, out_dir, threads):
    params = _params_from(config)
    delta = _scalar_from(config, "delta_gamma")
    dop = _doppler_from(config)
    method = config.get("method", "closed_form")
    dkz = config.get("dkz_per_m")
    theta_deg = _scalar_from(config, "theta_deg", 0.0)
    if method == "closed_form":
        pair = solve_twin_beam(params, delta, theta_deg, dkz, dop)
    elif method == "ode":
        kin = kinematics(params, delta, np.deg2rad(theta_deg))
        if dop is not None and dop.enabled:
            chi = averaged_susceptibilities(params, delta, kin, dop)
        else:
            chi = susceptibilities(params, delta)
        cpl = coupling(chi, kin, params.pump_index)
        if dkz is not None:
            from dataclasses import replace
            cpl = replace(cpl, dkz=float(dkz))
        pair = integrate_ode(cpl, params.length, int(config.get("steps", 4000)))
    else:
        raise ConfigError(f'unknown propagation method {method!r}')
    payload = {
        "g_p": pair.g_p, "g_c": pair.g_c,
        "log_gp": pair.log_gp, "log_gc": pair.log_gc,
        "e_p": {"re": pair.e_p.real, "im": pair.e_p.imag},
        "e_c_conj": {"re": pair.e_c_conj.real, "im": pair.e_c_conj.imag},
        "method": method,
    }
    with open(out_dir / "propagate.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ["propagate.json"]


def _run_gainmap(config, out_dir, threads):
    params = _params_from(config)
    delta = _axis_from(config, "delta_gamma")
    if "theta_deg" in config:
        kind, second = "theta_deg", _axis_from(config, "theta_deg")
    elif "dkz_per_m" in config:
        kind, second = "dkz", _axis_from(config, "dkz_per_m")
    else:
        raise ConfigError('config must contain a "theta_deg" or "dkz_per_m" axis')
    dop = _doppler_from(config)
    gm = gain_map(params, delta, kind, second, dop, threads=threads)
    rows = []
    for i, s in enumerate(gm.second_values):
        for j, d in enumerate(gm.delta):
            rows.append((d, s, gm.gp[i, j], gm.gc[i, j]))
    second_col = "theta_deg" if kind == "theta_deg" else "dkz_per_m"
    write_csv(out_dir / "gainmap.csv",
              ["delta_gamma", second_col, "g_p", "g_c"], rows)
    sidecar = {"metadata": gm.metadata,
               "delta_gamma": list(map(float, gm.delta)),
               second_col: list(map(float, gm.second_values))}
    with open(out_dir / "gainmap.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ["gainmap.csv", "gainmap.json"]


def _run_doppler_gain(config, out_dir, threads):
    params = _params_from(config)
    delta = _axis_from(config, "delta_gamma")
    theta_deg = _scalar_from(config, "theta_deg", 0.0)
    dop = _doppler_from(config) or DopplerConfig()
    bare = gain_map(params, delta, "theta_deg", np.asarray([theta_deg]), None)
    avg = gain_map(params, delta, "theta_deg", np.asarray([theta_deg]), dop,
                   threads=threads)
    rows = np.column_stack([delta, bare.gp[0], bare.gc[0], avg.gp[0], avg.gc[0]])
    write_csv(out_dir / "doppler_gain.csv",
              ["delta_gamma", "g_p_bare", "g_c_bare", "g_p_doppler", "g_c_doppler"],
              rows)
    return ["doppler_gain.csv"]


def _run_fit(config, out_dir, threads):
    params = _params_from(config)
    data_path = config.get("data")
    if not data_path:
        raise ConfigError('config must contain "data": path to the gain CSV')
    dataset = load_gain_data(data_path)
    free = config.get("free", list(FIT_PARAMETERS))
    bounds = {k: tuple(v) for k, v in config.get("bounds", {}).items()}
    dop = _doppler_from(config)
    result = fit_model(dataset, params, free=free, bounds=bounds, doppler=dop)
    payload = {
        "fitted": result.fitted,
        "free": list(result.free),
        "status": result.status,
        "message": result.message,
        "n_iterations": result.n_iterations,
        "objective_history": [float(x) for x in result.objective_history],
        "covariance": None if result.covariance is None
        else [[float(x) for x in row] for row in result.covariance],
        "n_records": len(dataset),
    }
    with open(out_dir / "fit.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ["fit.json"]


def _run_oracle(config, out_dir, threads):
    params = _params_from(config)
    delta = _scalar_from(config, "delta_gamma")
    seed_scale = _scalar_from(config, "seed_scale", 1e-5)
    state = evolve_to_steady_state(params, delta)
    chi = extract_susceptibilities(
        params, delta, seed_scale=seed_scale,
        check_linearity=bool(config.get("check_linearity", False)),
    )
    payload = {
        "sigma_re": [[float(x) for x in row] for row in state.sigma.real],
        "sigma_im": [[float(x) for x in row] for row in state.sigma.imag],
        "residual": state.residual,
        "chi": {name: {"re": float(np.real(v)), "im": float(np.imag(v))}
                for name, v in (("chi_pp", chi.chi_pp), ("chi_cc", chi.chi_cc),
                                ("chi_pc", chi.chi_pc), ("chi_cp", chi.chi_cp))},
    }
    with open(out_dir / "oracle.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ["oracle.json"]


_RUNNERS = {
    "chi": _run_chi,
    "propagate": _run_propagate,
    "gainmap": _run_gainmap,
    "doppler-gain": _run_doppler_gain,
    "fit": _run_fit,
    "oracle": _run_oracle,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lambda4wm",
        description="Twin-beam mixing in a hot double-lambda vapor: "
                    "susceptibilities, gain maps, Doppler averaging, fits.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker threads (default: ${ENV_THREADS} or all cores)")
    return parser


def _resolve_threads(flag_value, config) -> int:
    if flag_value is not None:       # CLI flag overrides config and environment
        return max(1, int(flag_value))
    if "threads" in config:
        return max(1, int(config["threads"]))
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{ENV_THREADS} must be an integer, got {env!r}")
    return os.cpu_count() or 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    started = time.time()
    try:
        config = _load_config(args.config)
        threads = _resolve_threads(args.threads, config)
        out_dir = Path(args.out)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {out_dir}: {exc}")
        merged = dict(config)
        merged["threads"] = threads
        outputs = _RUNNERS[args.subcommand](merged, out_dir, threads)
    except (ConfigError, ParameterError, DataFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, NonFiniteFieldError, SeedNonlinearityError,
            ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2

    manifest = {
        "subcommand": args.subcommand,
        "version": __version__,
        "config_path": str(Path(args.config).resolve()),
        "config": merged,
        "out_dir": str(out_dir.resolve()),
        "outputs": outputs,
        "threads": threads,
        "duration_s": time.time() - started,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
