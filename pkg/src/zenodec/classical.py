"""Classical phase-space dynamics: transport with momentum diffusion,

    dw/dt = -(p/m) dw/dx + D d2w/dp2,

with an absorbing region boundary, the quasi-stationary decay mode, and an
independent Langevin Monte Carlo oracle.

In dimensionless variables xbar = x/L, pbar = p/p_s, tbar = t*lambda with
p_s = (mLD)^(1/3) and lambda = (D/m^2L^2)^(1/3) the equation is
parameter-free, so the decay mode is computed once and rescaled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigurationError, ConvergenceError, NumericalError
from .lattice import Grid1D
from .propagators import QBMParams


@dataclass(frozen=True)
class PhaseSpaceDistribution:
    x_grid: Grid1D
    p_grid: Grid1D
    values: np.ndarray  # (p, x), non-negative
    time: float = 0.0

    def __post_init__(self):
        if self.values.shape != (self.p_grid.n_points, self.x_grid.n_points):
            raise ConfigurationError("phase-space values shape does not match grids")

    @property
    def mass(self) -> float:
        return float(np.sum(self.values) * self.p_grid.spacing * self.x_grid.spacing)

    def moments(self) -> dict:
        x = self.x_grid.points[None, :]
        p = self.p_grid.points[:, None]
        m = self.mass
        cell = self.p_grid.spacing * self.x_grid.spacing
        return {
            "x2": float(np.sum(x**2 * self.values) * cell / m),
            "p2": float(np.sum(p**2 * self.values) * cell / m),
            "xp2": float(2.0 * np.sum(x * p * self.values) * cell / m),
        }


def evolve_classical(w: PhaseSpaceDistribution, params: QBMParams, t: float,
                     absorbing: bool, L: float = 1.0,
                     gate_period: float | None = None) -> PhaseSpaceDistribution:
    """Advance the distribution by t with internal CFL substepping.

    Advection is van Leer flux-limited upwind (positivity-preserving,
    conservative in a closed box); diffusion is forward Euler within its
    stability bound.  ``absorbing`` zeroes the region |x| > L/2 after every
    substep (a continuous absorber); with ``gate_period`` set, the zeroing
    happens only at multiples of that period instead.
    """
    if t <= 0:
        raise ConfigurationError(f"evolution time must be positive, got {t}")
    dx, dp = w.x_grid.spacing, w.p_grid.spacing
    vel = np.ascontiguousarray(w.p_grid.points / params.m)
    vmax = np.max(np.abs(vel))
    dt_cfl = 0.9 * dx / vmax if vmax > 0 else t
    if params.D > 0:
        dt_cfl = min(dt_cfl, 0.25 * dp**2 / params.D)
    n_sub = max(1, int(np.ceil(t / dt_cfl)))
    dt = t / n_sub

    outside = np.abs(w.x_grid.points) > L / 2
    gate_every = None
    if gate_period is not None:
        gate_every = max(1, int(round(gate_period / dt)))

    cur = np.ascontiguousarray(w.values, dtype=float).copy()
    scratch = np.empty_like(cur)
    nxt = np.empty_like(cur)
    for step in range(1, n_sub + 1):
        _kernels.fp_substep(cur, scratch, nxt, vel, dx, dp, dt, params.D)
        cur, nxt = nxt, cur
        if absorbing and (gate_every is None or step % gate_every == 0):
            cur[:, outside] = 0.0
    out = PhaseSpaceDistribution(w.x_grid, w.p_grid, cur, w.time + t)
    if out.mass < -1e-12:
        raise NumericalError(f"negative mass {out.mass:.3e} after evolution")
    return out


@dataclass(frozen=True)
class SteadyMode:
    """Quasi-stationary decay mode: w(t) ~ exp(-lambda t) * shape."""

    decay_rate: float
    shape: PhaseSpaceDistribution
    moments: dict


def _initial_shape(kind: str, x, p) -> np.ndarray:
    envelope = np.exp(-(p[:, None] ** 2) / 2.0)
    inside = (np.abs(x) <= 0.5).astype(float)[None, :]
    if kind == "uniform":
        return envelope * inside
    if kind == "gaussian":
        return envelope * np.exp(-(x[None, :] ** 2) / (2 * 0.2**2))
    if kind == "cosine":
        return envelope * np.cos(np.clip(np.pi * x[None, :], -np.pi / 2, np.pi / 2)) * inside
    raise ConfigurationError(f"unknown initial shape {kind!r}")


def find_steady_mode(nx: int = 110, n_p: int = 160, dx: float = 0.01,
                     dp: float = 0.05, shape_tol: float = 1e-6,
                     max_tbar: float = 60.0, initial: str = "cosine") -> SteadyMode:
    """Dimensionless decay mode with a continuous absorber at |xbar| > 1/2.

    Power iteration in time: evolve, renormalize, and stop once the shape
    changes by less than shape_tol (L1 per unit tbar).  The decay rate is
    the asymptotic mass-loss rate in tbar units; multiply by
    (D/m^2L^2)^(1/3) for dimensional rates.
    """
    x_grid = Grid1D(nx, dx)
    p_grid = Grid1D(n_p, dp)
    params = QBMParams(m=1.0, D=1.0)
    vals = _initial_shape(initial, x_grid.points, p_grid.points)
    w = PhaseSpaceDistribution(x_grid, p_grid, vals / np.sum(vals) / (dx * dp))

    block = 1.0
    lam = None
    for _ in range(int(max_tbar / block)):
        nxt = evolve_classical(w, params, block, absorbing=True)
        lam = -np.log(nxt.mass / w.mass) / block
        renorm = nxt.values / nxt.mass
        change = float(np.sum(np.abs(renorm - w.values)) * dx * dp) / block
        w = PhaseSpaceDistribution(x_grid, p_grid, renorm)
        if change < shape_tol:
            return SteadyMode(decay_rate=float(lam), shape=w, moments=w.moments())
    raise ConvergenceError(
        f"decay mode not settled within tbar={max_tbar} (last shape change {change:.2e})")


def rescale_steady_mode(mode: SteadyMode, params: QBMParams, L: float) -> dict:
    """Dimensional decay rate and moments for given (m, D, L)."""
    lam = (params.D / (params.m**2 * L**2)) ** (1.0 / 3.0)
    p_s = (params.m * L * params.D) ** (1.0 / 3.0)
    return {
        "decay_rate": mode.decay_rate * lam,
        "x2": mode.moments["x2"] * L**2,
        "p2": mode.moments["p2"] * p_s**2,
        "xp2": mode.moments["xp2"] * L * p_s,
    }


@dataclass(frozen=True)
class LangevinResult:
    times: np.ndarray
    survival: np.ndarray
    moments: dict
    n_initial: int
    n_surviving: int


def langevin_oracle(params: QBMParams, L: float, n_particles: int, t: float,
                    seed: int, dt: float | None = None, chunk: int = 64,
                    initial: str = "cosine") -> LangevinResult:
    """Euler-Maruyama particles: dx = (p/m) dt, dp = sqrt(2D) dW, absorbed at
    |x| > L/2.  Starts at p = 0 with positions drawn from a cos^2(pi x/L)
    bump (matching the confined quasi-mode) or uniformly in the region.

    The default step resolves the classical decay time by a factor of 400.
    Survival is recorded after every step; the moments are those of the
    surviving ensemble at the final time.
    """
    if n_particles < 1:
        raise ConfigurationError("need at least one particle")
    rng = np.random.default_rng(seed)
    if dt is None:
        lam_inv = (params.m**2 * L**2 / params.D) ** (1.0 / 3.0) if params.D > 0 else t
        dt = lam_inv / 400.0
    n_steps = max(1, int(round(t / dt)))
    dt = t / n_steps

    if initial == "uniform":
        x = rng.uniform(-L / 2, L / 2, size=n_particles)
    elif initial == "cosine":
        x = np.empty(n_particles)
        filled = 0
        while filled < n_particles:  # rejection sampling of cos^2(pi x / L)
            cand = rng.uniform(-L / 2, L / 2, size=2 * (n_particles - filled))
            keep = cand[rng.uniform(size=cand.size) < np.cos(np.pi * cand / L) ** 2]
            take = min(keep.size, n_particles - filled)
            x[filled:filled + take] = keep[:take]
            filled += take
    else:
        raise ConfigurationError(f"unknown initial distribution {initial!r}")
    p = np.zeros(n_particles)
    alive = np.ones(n_particles, dtype=np.uint8)
    kick = np.sqrt(2.0 * params.D * dt)
    survivors = np.empty(n_steps, dtype=np.int64)

    done = 0
    while done < n_steps:
        todo = min(chunk, n_steps - done)
        noise = rng.standard_normal((todo, n_particles))
        _kernels.langevin_chunk(x, p, alive, noise, dt, params.m, kick, L / 2,
                                survivors[done:done + todo])
        done += todo

    live = alive.view(bool)
    n_surv = int(live.sum())
    if n_surv > 0:
        moments = {
            "x2": float(np.mean(x[live] ** 2)),
            "p2": float(np.mean(p[live] ** 2)),
            "xp2": float(2.0 * np.mean(x[live] * p[live])),
        }
    else:
        moments = {"x2": np.nan, "p2": np.nan, "xp2": np.nan}
    times = dt * np.arange(1, n_steps + 1)
    return LangevinResult(times=times, survival=survivors / n_particles,
                          moments=moments, n_initial=n_particles,
                          n_surviving=n_surv)
