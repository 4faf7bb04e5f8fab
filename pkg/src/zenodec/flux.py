"""Probability flux lines of the evolving density matrix.

The spatial probability obeys a continuity equation with current

    J(x) = (hbar/m) Im d/dx rho(x, y) |_{y=x},

and flux lines are integral curves of v = J / rho(x, x).  Lines seeded at
quantiles of the initial density keep their quantile under continuous
evolution (Lagrangian form of the continuity equation); projections remove
probability non-uniformly, so quantiles are re-baselined at each projection
event and the lines are continued in the post-projection field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .lattice import DensityMatrix, Grid1D, spectral_derivative
from .projectors import apply_projection
from .runner import ExperimentConfig, _CachedKernel, initial_state

DENSITY_FLOOR = 1e-10


def current(rho: DensityMatrix, m: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """J(x), real by construction for Hermitian input."""
    drho = spectral_derivative(rho.values, axis=0, spacing=rho.grid.spacing)
    return (hbar / m) * np.imag(np.diagonal(drho))


@dataclass(frozen=True)
class VelocityField:
    """v(x, t) samples on the stored time stamps; NaN below the density floor."""

    x_grid: Grid1D
    times: np.ndarray
    values: np.ndarray  # (n_times, n_x)


def velocity(rho: DensityMatrix, m: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """v = J / rho(x,x), NaN-masked where the density is below
    DENSITY_FLOOR times its maximum."""
    dens = rho.diagonal
    j = current(rho, m, hbar)
    out = np.full_like(j, np.nan)
    ok = dens > DENSITY_FLOOR * dens.max()
    out[ok] = j[ok] / dens[ok]
    return out


@dataclass(frozen=True)
class FluxLineSet:
    seeds: np.ndarray
    times: np.ndarray
    trajectories: np.ndarray        # (n_times, n_lines); NaN after termination
    densities: np.ndarray           # rho(x,x) history, (n_times, n_x)
    velocity_field: VelocityField
    projection_times: np.ndarray
    max_quantile_drift: float       # worst drift between projections


def _quantile_positions(x: np.ndarray, dens: np.ndarray, eta: float,
                        quantiles: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(dens) * eta
    cdf = cdf / cdf[-1]
    return np.interp(quantiles, cdf, x)


def _quantiles_of(x: np.ndarray, dens: np.ndarray, eta: float,
                  positions: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(dens) * eta
    cdf = cdf / cdf[-1]
    return np.interp(positions, x, cdf)


def _sample_velocity(v: np.ndarray, x_pts: np.ndarray, eta: float,
                     positions: np.ndarray) -> np.ndarray:
    """Linear interpolation, stepping over up to two masked cells."""
    out = np.empty_like(positions)
    for i, pos in enumerate(positions):
        if np.isnan(pos):
            out[i] = np.nan
            continue
        j = int(np.clip((pos - x_pts[0]) / eta, 0, len(x_pts) - 2))
        v0, v1 = v[j], v[j + 1]
        if np.isnan(v0) or np.isnan(v1):
            window = v[max(0, j - 2):j + 4]
            finite = window[~np.isnan(window)]
            out[i] = finite[np.argmin(np.abs(finite))] if finite.size else np.nan
        else:
            w = (pos - x_pts[j]) / eta
            out[i] = (1 - w) * v0 + w * v1
    return out


def trace_flux_lines(config: ExperimentConfig, n_lines: int,
                     state: DensityMatrix | None = None,
                     seeds: np.ndarray | None = None) -> FluxLineSet:
    """Integrate n_lines flux lines through the projection-evolution run.

    Seeds sit at the k/(n_lines+1) quantiles of the initial density unless
    given explicitly.  The state is stored every config.dt; each line
    advances with a Heun step using the velocity fields at both ends of the
    interval (pre-projection fields; projections reset the field and the
    quantile baseline).  Lines that leave the grid or a >2-cell masked
    region are terminated (NaN).
    """
    if n_lines < 2:
        raise ConfigurationError("need at least two flux lines")
    if state is None:
        state = initial_state(config)
    grid = config.grid
    x_pts, eta = grid.points, grid.spacing
    hbar, m = config.qbm.hbar, config.qbm.m

    steps_per_eps = int(round(config.eps / config.dt))
    n_steps = int(round(config.total_time / config.dt))
    kern = _CachedKernel(grid, config.qbm, config.dt)

    state, _ = apply_projection(state, config.proj, hbar)
    if seeds is None:
        quantiles = np.arange(1, n_lines + 1) / (n_lines + 1)
        pos = _quantile_positions(x_pts, state.diagonal, eta, quantiles)
    else:
        if len(seeds) != n_lines:
            raise ConfigurationError("seed count must match n_lines")
        pos = np.asarray(seeds, dtype=float).copy()
    baseline = _quantiles_of(x_pts, state.diagonal, eta, pos)

    times = np.empty(n_steps + 1)
    traj = np.empty((n_steps + 1, n_lines))
    dens_hist = np.empty((n_steps + 1, grid.n_points))
    vel_hist = np.empty((n_steps + 1, grid.n_points))
    proj_times = []
    times[0], traj[0] = 0.0, pos
    dens_hist[0] = state.diagonal
    v_now = velocity(state, m, hbar)
    vel_hist[0] = v_now
    max_drift = 0.0

    for k in range(1, n_steps + 1):
        evolved = kern.apply(state)
        v_next = velocity(evolved, m, hbar)

        v0 = _sample_velocity(v_now, x_pts, eta, pos)
        guess = pos + config.dt * v0
        v1 = _sample_velocity(v_next, x_pts, eta, guess)
        pos = pos + 0.5 * config.dt * (v0 + np.where(np.isnan(v1), v0, v1))
        pos = np.where(np.abs(pos) > x_pts[-1], np.nan, pos)

        live = ~np.isnan(pos)
        drift = _quantiles_of(x_pts, evolved.diagonal, eta, pos[live]) - baseline[live]
        max_drift = max(max_drift, float(np.max(np.abs(drift))) if drift.size else 0.0)

        state, v_now = evolved, v_next
        if k % steps_per_eps == 0:
            state, _ = apply_projection(state, config.proj, hbar)
            v_now = velocity(state, m, hbar)
            baseline = _quantiles_of(x_pts, state.diagonal, eta, pos)
            proj_times.append(k * config.dt)

        times[k], traj[k] = k * config.dt, pos
        dens_hist[k] = state.diagonal
        vel_hist[k] = v_now

    field = VelocityField(grid, times, vel_hist)
    return FluxLineSet(seeds=traj[0].copy(), times=times, trajectories=traj,
                       densities=dens_hist, velocity_field=field,
                       projection_times=np.array(proj_times),
                       max_quantile_drift=max_drift)
