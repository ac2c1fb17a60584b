"""Gain maps over (delta, angle-or-mismatch) grids and damped least-squares fits.

The forward model behind both: susceptibilities (optionally Doppler
averaged) -> coupled-mode coefficients -> closed-form twin-beam gains.
Measured gain datasets are fitted in log-gain, which weighs the three
decades between the gain peaks and the wings evenly; Omega, N and gamma_c
are optimized through their logarithms to enforce positivity while the
pump-index deviation epsilon is fitted linearly inside a narrow window.
The pump one-photon detuning stays fixed during fits: experimentally it is
calibrated, not inferred.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .doppler import DopplerConfig, averaged_susceptibilities
from .params import ModelParams, kinematics, serialize_params
from .propagation import closed_form_fields, coupling, solve_closed_form
from .susceptibility import susceptibilities

AXIS_KINDS = ("theta_deg", "dkz")
FIT_PARAMETERS = ("omega_rabi", "density", "gamma_c", "epsilon_pump")

#: positivity (log) transform applies to all fitted parameters except epsilon
_LOG_SCALED = ("omega_rabi", "density", "gamma_c")

DEFAULT_BOUNDS = {
    "omega_rabi": (1e-3, 1e4),
    "density": (1e10, 1e25),
    "gamma_c": (1e-6, 1e2),
    "epsilon_pump": (-1e-4, 1e-4),
}

DATA_HEADER = ("delta_gamma", "theta_deg", "g_p", "g_c")


class DataFormatError(ValueError):
    """Malformed gain dataset file."""


@dataclass(frozen=True)
class GainMap:
    """Intensity gains on a (second_axis x delta) grid.

    gp[i, j] and gc[i, j] belong to (second_values[i], delta[j]); cells where
    the model failed are NaN. ``second_kind`` is "theta_deg" or "dkz"
    (rad/m). ``metadata`` snapshots the generating parameters.
    """

    delta: np.ndarray
    second_values: np.ndarray
    second_kind: str
    gp: np.ndarray
    gc: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.second_kind not in AXIS_KINDS:
            raise ValueError(f"second_kind must be one of {AXIS_KINDS}")
        if self.gp.shape != (len(self.second_values), len(self.delta)):
            raise ValueError("grid shape inconsistent with axes")
        if self.gc.shape != self.gp.shape:
            raise ValueError("gp/gc shapes differ")


@dataclass(frozen=True)
class GainDataset:
    """Measured (or synthesized) gains versus (delta, theta)."""

    delta: np.ndarray
    theta_deg: np.ndarray
    g_p: np.ndarray
    g_c: np.ndarray
    weight: np.ndarray

    def __len__(self) -> int:
        return len(self.delta)


@dataclass(frozen=True)
class FitResult:
    """Outcome of a damped least-squares fit."""

    params_out: ModelParams
    fitted: dict
    free: tuple
    status: str                 # converged | max-iter | stalled
    objective_history: np.ndarray
    residuals: np.ndarray
    covariance: Optional[np.ndarray]
    n_iterations: int
    message: str = ""


# ---------------------------------------------------------------------------
# forward model
# ---------------------------------------------------------------------------

def _chi_arrays(params, delta, kin, doppler):
    if doppler is not None and doppler.enabled:
        chi = averaged_susceptibilities(params, delta, kin, doppler)
    else:
        chi = susceptibilities(params, delta)
    return chi


def _gains_for_column(params, delta, kin_theta, dkz, doppler):
    """Gains for a vector of deltas at one geometry column.

    ``dkz`` may be a scalar or an array broadcast against delta.
    """
    chi = _chi_arrays(params, delta, kin_theta, doppler)
    kin = [kinematics(params, d, kin_theta.theta) for d in np.atleast_1d(delta)]
    kp = np.array([k.kp for k in kin])
    kc = np.array([k.kc for k in kin])
    a_pp = 1j * kp * chi.chi_pp / 2
    a_pc = 1j * kp * chi.chi_pc / 2
    a_cp = 1j * kc * np.conj(chi.chi_cp) / 2
    a_cc = 1j * kc * np.conj(chi.chi_cc) / 2
    _, _, log_gp, log_gc = closed_form_fields(a_pp, a_pc, a_cp, a_cc, dkz,
                                              params.length)
    return np.exp(log_gp), np.exp(log_gc)


def solve_twin_beam(params: ModelParams, delta: float, theta_deg: float = 0.0,
                    dkz: Optional[float] = None,
                    doppler: Optional[DopplerConfig] = None):
    """Closed-form FieldPair at a single (delta, geometry) point.

    The geometry is set either by the pump-probe angle ``theta_deg`` (the
    mismatch then follows from the pump index n0 = 1 - epsilon_pump) or by an
    explicit ``dkz`` in rad/m, which overrides the angle.
    """
    kin = kinematics(params, delta, np.deg2rad(theta_deg))
    chi = _chi_arrays(params, delta, kin, doppler)
    cpl = coupling(chi, kin, params.pump_index)
    if dkz is not None:
        cpl = replace(cpl, dkz=float(dkz))
    return solve_closed_form(cpl, params.length)


def gain_map(params: ModelParams, delta_grid, axis_kind: str, axis_values,
             doppler: Optional[DopplerConfig] = None,
             threads: int = 1) -> GainMap:
    """Probe/conjugate gain grids over delta x (theta or phase mismatch).

    A theta axis is mapped to Dk_z through the pump index n0 = 1 - epsilon;
    an explicit "dkz" axis bypasses the geometry (theta = 0 is then used for
    any Doppler projections). Failed cells are recorded as NaN; the map is
    deterministic and independent of ``threads``.
    """
    delta_grid = np.asarray(delta_grid, dtype=float)
    axis_values = np.asarray(axis_values, dtype=float)
    if axis_kind not in AXIS_KINDS:
        raise ValueError(f"axis_kind must be one of {AXIS_KINDS}")
    if delta_grid.size == 0 or axis_values.size == 0:
        raise ValueError("grid axes must be non-empty")
    for name, axis in (("delta", delta_grid), ("second", axis_values)):
        if axis.size > 1 and not np.all(np.diff(axis) > 0):
            raise ValueError(f"{name} axis must be strictly increasing")

    gp = np.full((axis_values.size, delta_grid.size), np.nan)
    gc = np.full_like(gp, np.nan)

    def fill_row(i):
        try:
            if axis_kind == "theta_deg":
                theta = np.deg2rad(axis_values[i])
                kin = kinematics(params, float(delta_grid[0]), theta)
                dkz = np.array([
                    2 * params.pump_index * k.k0 - (k.kp + k.kc) * np.cos(theta)
                    for k in (kinematics(params, d, theta) for d in delta_grid)
                ])
            else:
                kin = kinematics(params, float(delta_grid[0]), 0.0)
                dkz = np.full(delta_grid.size, axis_values[i])
            row_gp, row_gc = _gains_for_column(params, delta_grid, kin, dkz, doppler)
            gp[i], gc[i] = row_gp, row_gc
        except (ArithmeticError, ValueError):
            pass  # leave the row as NaN; per-point failures never abort a map

    rows = range(axis_values.size)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill_row, rows))
    else:
        for i in rows:
            fill_row(i)

    metadata = {
        "params": serialize_params(params),
        "axis_kind": axis_kind,
        "doppler_enabled": bool(doppler is not None and doppler.enabled),
    }
    return GainMap(delta=delta_grid, second_values=axis_values,
                   second_kind=axis_kind, gp=gp, gc=gc, metadata=metadata)


# ---------------------------------------------------------------------------
# dataset I/O
# ---------------------------------------------------------------------------

def load_gain_data(path) -> GainDataset:
    """Read a gain dataset CSV with header delta_gamma,theta_deg,g_p,g_c[,weight].

    Rows with non-positive or non-numeric gains and duplicated (delta, theta)
    keys are rejected with their line numbers; the header must match exactly.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if tuple(header) != DATA_HEADER and tuple(header) != DATA_HEADER + ("weight",):
            raise DataFormatError(
                f"{path}: header must be exactly {','.join(DATA_HEADER)}[,weight], "
                f"got {','.join(header)}"
            )
        has_weight = len(header) == 5
        rows, seen = [], {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataFormatError(f"{path}:{lineno}: expected {len(header)} fields")
            try:
                values = [float(x) for x in row]
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-numeric entry") from None
            if values[2] <= 0 or values[3] <= 0:
                raise DataFormatError(f"{path}:{lineno}: gains must be positive")
            if has_weight and values[4] <= 0:
                raise DataFormatError(f"{path}:{lineno}: weight must be positive")
            key = (values[0], values[1])
            if key in seen:
                raise DataFormatError(
                    f"{path}:{lineno}: duplicate (delta, theta) key, first seen "
                    f"on line {seen[key]}"
                )
            seen[key] = lineno
            rows.append(values)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    arr = np.asarray(rows)
    weight = arr[:, 4] if has_weight else np.ones(len(arr))
    return GainDataset(delta=arr[:, 0], theta_deg=arr[:, 1],
                       g_p=arr[:, 2], g_c=arr[:, 3], weight=weight)


def write_gain_data(path, dataset: GainDataset, include_weight: bool = False):
    """Write a dataset in the exact CSV schema read by :func:`load_gain_data`."""
    header = DATA_HEADER + (("weight",) if include_weight else ())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(len(dataset)):
            row = [dataset.delta[i], dataset.theta_deg[i],
                   dataset.g_p[i], dataset.g_c[i]]
            if include_weight:
                row.append(dataset.weight[i])
            writer.writerow(f"{x:.16e}" for x in row)


def dataset_from_gain_map(gm: GainMap) -> GainDataset:
    """Flatten a theta-axis gain map into a dataset (model-generated data)."""
    if gm.second_kind != "theta_deg":
        raise ValueError("only theta_deg maps flatten to a dataset")
    theta, delta = np.meshgrid(gm.second_values, gm.delta, indexing="ij")
    keep = np.isfinite(gm.gp) & np.isfinite(gm.gc) & (gm.gp > 0) & (gm.gc > 0)
    return GainDataset(delta=delta[keep], theta_deg=theta[keep],
                       g_p=gm.gp[keep], g_c=gm.gc[keep],
                       weight=np.ones(int(keep.sum())))


# ---------------------------------------------------------------------------
# damped least-squares fit
# ---------------------------------------------------------------------------

def _model_log_gains(params: ModelParams, dataset: GainDataset,
                     doppler: Optional[DopplerConfig]):
    """log g at every dataset point, vectorized over records via unique deltas."""
    uniq, inverse = np.unique(dataset.delta, return_inverse=True)
    chi = _chi_arrays(params, uniq,
                      kinematics(params, float(uniq[0]),
                                 np.deg2rad(float(np.median(dataset.theta_deg)))),
                      doppler)
    chi_pp = np.asarray(chi.chi_pp)[inverse]
    chi_cc = np.asarray(chi.chi_cc)[inverse]
    chi_pc = np.asarray(chi.chi_pc)[inverse]
    chi_cp = np.asarray(chi.chi_cp)[inverse]

    kin = [kinematics(params, d, 0.0) for d in uniq]
    kp = np.array([k.kp for k in kin])[inverse]
    kc = np.array([k.kc for k in kin])[inverse]
    k0 = kin[0].k0
    theta = np.deg2rad(dataset.theta_deg)
    dkz = 2 * params.pump_index * k0 - (kp + kc) * np.cos(theta)

    a_pp = 1j * kp * chi_pp / 2
    a_pc = 1j * kp * chi_pc / 2
    a_cp = 1j * kc * np.conj(chi_cp) / 2
    a_cc = 1j * kc * np.conj(chi_cc) / 2
    _, _, log_gp, log_gc = closed_form_fields(a_pp, a_pc, a_cp, a_cc, dkz,
                                              params.length)
    return log_gp, log_gc


def _residuals(params, dataset, doppler):
    log_gp, log_gc = _model_log_gains(params, dataset, doppler)
    w = np.sqrt(dataset.weight)
    r = np.concatenate([w * (log_gp - np.log(dataset.g_p)),
                        w * (log_gc - np.log(dataset.g_c))])
    return r


def _encode(params, free):
    u = []
    for name in free:
        p = getattr(params, name)
        u.append(np.log(p) if name in _LOG_SCALED else p)
    return np.asarray(u)


def _decode(u, free, base: ModelParams) -> ModelParams:
    changes = {}
    for name, ui in zip(free, u):
        changes[name] = float(np.exp(ui)) if name in _LOG_SCALED else float(ui)
    return base.with_updates(**changes)


def _encode_bounds(bounds, free):
    lo, hi = [], []
    for name in free:
        b_lo, b_hi = bounds[name]
        if name in _LOG_SCALED:
            b_lo, b_hi = np.log(b_lo), np.log(b_hi)
        lo.append(b_lo)
        hi.append(b_hi)
    return np.asarray(lo), np.asarray(hi)


def fit_model(dataset: GainDataset, initial: ModelParams,
              free: Sequence[str] = FIT_PARAMETERS,
              bounds: Optional[dict] = None,
              doppler: Optional[DopplerConfig] = None,
              *, max_iterations: int = 200, lambda0: float = 1e-3,
              lambda_cap: float = 1e12, jac_rel_step: float = 1e-4,
              gtol: float = 1e-12, ftol: float = 1e-14,
              xtol: float = 1e-12) -> FitResult:
    """Fit the free parameters to a gain dataset by damped least squares.

    Minimizes sum of weight * (log g_model - log g_data)^2 over both gains
    with a Levenberg-Marquardt loop: forward-difference Jacobian (relative
    step ``jac_rel_step``), Marquardt scaling of the damping, step accepted
    only when it strictly decreases the objective, damping raised on
    rejection and declared "stalled" beyond ``lambda_cap``. Trial points are
    clipped into ``bounds`` (in physical units). Non-finite trial residuals
    reject the step.
    """
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    free = tuple(free)
    for name in free:
        if name not in FIT_PARAMETERS:
            raise ValueError(f"unknown fit parameter {name!r}")
    merged_bounds = dict(DEFAULT_BOUNDS)
    merged_bounds.update(bounds or {})

    r = _residuals(initial, dataset, doppler)
    if not np.all(np.isfinite(r)):
        raise ValueError("model is non-finite at the initial parameters")
    objective = float(r @ r)
    history = [objective]

    if not free:
        return FitResult(params_out=initial, fitted={}, free=(),
                         status="converged", objective_history=np.array(history),
                         residuals=r, covariance=None, n_iterations=0,
                         message="no free parameters")

    for name in free:
        p = getattr(initial, name)
        if not (merged_bounds[name][0] <= p <= merged_bounds[name][1]):
            raise ValueError(f"initial {name}={p!r} outside bounds")
    lo, hi = _encode_bounds(merged_bounds, free)
    u = _encode(initial, free)

    lam = lambda0
    status, message = "max-iter", ""
    n_iter = 0
    J = None
    for n_iter in range(1, max_iterations + 1):
        J = _jacobian(u, free, initial, dataset, doppler, r, jac_rel_step, lo, hi)
        g = J.T @ r
        if np.max(np.abs(g)) < gtol:
            status, message = "converged", "gradient below tolerance"
            break
        JtJ = J.T @ J
        scale = np.diag(JtJ).copy()
        scale[scale <= 0] = 1.0

        accepted = False
        while lam <= lambda_cap:
            try:
                step = np.linalg.solve(JtJ + lam * np.diag(scale), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            u_try = np.clip(u + step, lo, hi)
            try:
                r_try = _residuals(_decode(u_try, free, initial), dataset, doppler)
            except (ValueError, ArithmeticError):
                r_try = np.array([np.inf])
            obj_try = float(r_try @ r_try) if np.all(np.isfinite(r_try)) else np.inf
            if obj_try < objective:
                rel_drop = (objective - obj_try) / max(objective, 1e-300)
                moved = np.max(np.abs(u_try - u))
                u, r, objective = u_try, r_try, obj_try
                history.append(objective)
                lam = max(lam / 3.0, 1e-12)
                accepted = True
                if rel_drop < ftol:
                    status, message = "converged", "objective decrease below tolerance"
                elif moved < xtol * (1.0 + np.max(np.abs(u))):
                    status, message = "converged", "step below tolerance"
                break
            lam *= 10
        if status == "converged":
            break
        if not accepted:
            if objective <= 1e-20:
                status, message = "converged", "objective at numerical floor"
            else:
                status = "stalled"
                message = f"damping exceeded cap {lambda_cap:g} without improvement"
            break

    params_out = _decode(u, free, initial)
    covariance = _covariance(J, r, u, free) if J is not None else None
    fitted = {name: getattr(params_out, name) for name in free}
    return FitResult(params_out=params_out, fitted=fitted, free=free,
                     status=status, objective_history=np.asarray(history),
                     residuals=r, covariance=covariance,
                     n_iterations=n_iter, message=message)


def _jacobian(u, free, base, dataset, doppler, r0, rel_step, lo, hi):
    """Forward-difference Jacobian in the encoded parameter space."""
    J = np.empty((r0.size, u.size))
    for j in range(u.size):
        h = rel_step * max(abs(u[j]), 1e-3)
        if u[j] + h > hi[j]:  # step inward at the upper bound
            h = -h
        u_j = u.copy()
        u_j[j] += h
        r_j = _residuals(_decode(u_j, free, base), dataset, doppler)
        J[:, j] = (r_j - r0) / h
    return J


def _covariance(J, r, u, free):
    """Residual-based covariance proxy in physical parameter units."""
    m, n = J.shape
    dof = max(m - n, 1)
    try:
        cov_u = np.linalg.inv(J.T @ J) * (float(r @ r) / dof)
    except np.linalg.LinAlgError:
        return None
    # d p / d u = p for log-scaled parameters, 1 otherwise
    jac_diag = np.array([np.exp(ui) if name in _LOG_SCALED else 1.0
                         for name, ui in zip(free, u)])
    return cov_u * np.outer(jac_diag, jac_diag)
