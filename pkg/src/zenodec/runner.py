"""Projection-evolution sequences: survival curves, steady states, timescales.

The survival probability is the trace of the unnormalized state after each
projection (probability removal accumulates); the moment series records
renormalized moments immediately prior to each projection together with the
<p^2> decomposition of the projection that then acts, following the cycle

    <p^2>(t+eps) = p2_red(t) + delta(t) + sigma(t) + 2 D eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, ConvergenceError, DepletedStateError
from .lattice import (DensityMatrix, Grid1D, MomentSeries,
                      gaussian_density_matrix, moments)
from .projectors import Projector, apply_projection, window_function
from .propagators import QBMParams


INITIAL_GAUSSIAN = "gaussian"
INITIAL_STEADY = "prepared-steady-state"


@dataclass(frozen=True)
class ExperimentConfig:
    """All physical and numerical parameters of a run (units hbar=m=L=1)."""

    qbm: QBMParams = QBMParams()
    proj: Projector = Projector.smeared(1.0, 0.02)
    n_points: int = 256
    eta: float = 0.02
    eps: float = 0.01
    total_time: float = 0.5
    dt: float = 0.001
    initial: str = INITIAL_GAUSSIAN
    sigma: float = 0.1
    env_switch_on_time: float = 0.0
    seed: int = 0
    prep_tol: float = 1e-4
    prep_max_cycles: int = 3000

    def __post_init__(self):
        ratio = self.eps / self.dt
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ConfigurationError(
                f"eps={self.eps} must be an integer multiple of dt={self.dt}")
        if self.total_time < self.eps:
            raise ConfigurationError("total_time must cover at least one projection")
        if self.initial not in (INITIAL_GAUSSIAN, INITIAL_STEADY):
            raise ConfigurationError(f"unknown initial state {self.initial!r}")
        if self.sigma <= 0:
            raise ConfigurationError("sigma must be positive")

    @property
    def grid(self) -> Grid1D:
        return Grid1D(self.n_points, self.eta)


@dataclass(frozen=True)
class Timescales:
    """The timescale ledger of a configuration (all in units of the run)."""

    t_E: float
    t_loc: float
    tau_suppress: float
    lambda_inv: float
    p_s: float
    t_E_final: float
    p_c: float


def timescales(config: ExperimentConfig, p2_current: float) -> Timescales:
    q = config.qbm
    L = config.proj.L
    if p2_current <= 0:
        raise ConfigurationError("p2_current must be positive")
    if q.D > 0:
        t_loc = math.sqrt(q.m * q.hbar / q.D)
        tau = q.m * q.hbar / (q.D * config.eps)
        lam_inv = (q.m**2 * L**2 / q.D) ** (1.0 / 3.0)
        p_s = (q.m * L * q.D) ** (1.0 / 3.0)
        t_e_f = q.hbar * q.m ** (1.0 / 3.0) / (L * q.D) ** (2.0 / 3.0)
    else:
        t_loc = tau = lam_inv = t_e_f = math.inf
        p_s = 0.0
    return Timescales(
        t_E=q.hbar * q.m / p2_current,
        t_loc=t_loc,
        tau_suppress=tau,
        lambda_inv=lam_inv,
        p_s=p_s,
        t_E_final=t_e_f,
        p_c=q.m * L / config.eps,
    )


REGIME_ZENO = "zeno"
REGIME_CLASSICAL = "classical"
REGIME_TRIVIAL = "trivial-classical"


def classify_regime(ts: Timescales, eps: float) -> str:
    """Classical when the stationary energy time is beaten by the projection
    spacing; trivial-classical when even the localization time is (with a
    factor-2 margin, so the flagship classical configuration D=2e4, eps=0.01
    classifies as plain classical); Zeno-affected otherwise."""
    if ts.t_loc <= eps / 2:
        return REGIME_TRIVIAL
    if ts.t_E_final < eps:
        return REGIME_CLASSICAL
    return REGIME_ZENO


def regime_boundary_eps(config: ExperimentConfig) -> float:
    """The eps at which t_E_final = eps (boundary curve for sweep plots)."""
    return timescales(config, 1.0).t_E_final


class _CachedKernel:
    """Exact kernel propagator with precomputed multipliers for a fixed
    (grid, params, t); algebra identical to propagators.evolve_kernel."""

    def __init__(self, grid: Grid1D, params: QBMParams, t: float):
        n, eta = grid.n_points, grid.spacing
        hbar, m, D = params.hbar, params.m, params.D
        k = 2.0 * np.pi * np.fft.fftfreq(n, eta)
        self.free_half = np.exp(-1j * (hbar * t / (4.0 * m))
                                * (k[:, None] ** 2 - k[None, :] ** 2))
        self.t = t
        self.D = D
        if D > 0:
            x = grid.points
            self.damp = np.exp(-(D * t / hbar**2) * (x[:, None] - x[None, :]) ** 2)
            self.kfac = np.exp(-(D * t**3 / (12.0 * m**2))
                               * (k[:, None] + k[None, :]) ** 2)

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        vals = np.fft.fft2(rho.values)
        vals *= self.free_half
        if self.D > 0:
            vals = np.fft.fft2(self.damp * np.fft.ifft2(vals))
            vals *= self.kfac
        vals *= self.free_half
        return DensityMatrix(rho.grid, np.fft.ifft2(vals), rho.time + self.t)


def prepare_steady_state(config: ExperimentConfig,
                         state: DensityMatrix | None = None) -> DensityMatrix:
    """Projection-evolution cycles with the environment off (D=0) until the
    renormalized <p^2> settles; returns the renormalized state at time 0.

    Convergence requires the relative <p^2> change between cycles to drop
    below prep_tol together with the state itself settling (relative sup-norm
    change below prep_tol): the quasi-mode rings for many cycles and its
    <p^2> alone passes through quiet stretches near oscillation extrema.
    """
    grid = config.grid
    free = _CachedKernel(grid, config.qbm.with_diffusion(0.0), config.eps)
    g = window_function(config.proj, grid.points)
    gg = g[:, None] * g[None, :]

    if state is None:
        state = gaussian_density_matrix(grid, config.sigma, hbar=config.qbm.hbar)
    # the cycle itself ends on a projection, so the input is not pre-projected
    # (a second window application would disturb an already-settled state)
    p2_prev = moments(state, config.qbm.hbar).p2
    for cycle in range(1, config.prep_max_cycles + 1):
        evolved = free.apply(state)
        vals = gg * evolved.values
        norm = float(np.real(np.trace(vals)) * grid.spacing)
        if norm < 1e-12:
            raise DepletedStateError("state depleted during preparation")
        vals /= norm
        drift = np.max(np.abs(vals - state.values)) / np.max(np.abs(vals))
        state = DensityMatrix(grid, vals)
        p2 = moments(state, config.qbm.hbar).p2
        change = abs(p2 - p2_prev) / p2
        p2_prev = p2
        if change < config.prep_tol and drift < config.prep_tol:
            return DensityMatrix(grid, state.values, 0.0)
    raise ConvergenceError(
        f"steady state not reached in {config.prep_max_cycles} cycles "
        f"(last relative <p^2> change {change:.2e}, tolerance {config.prep_tol})")


def cosine_mode_overlap(state: DensityMatrix, L: float = 1.0) -> float:
    """Bhattacharyya overlap of the spatial density with the cos^2(pi x/L)
    profile, both renormalized over [-L/2, L/2]."""
    x = state.grid.points
    eta = state.grid.spacing
    inside = np.abs(x) <= L / 2
    dens = np.clip(state.diagonal[inside], 0.0, None)
    dens = dens / (np.sum(dens) * eta)
    ref = np.cos(np.pi * x[inside] / L) ** 2
    ref = ref / (np.sum(ref) * eta)
    return float(np.sum(np.sqrt(dens * ref)) * eta)


def initial_state(config: ExperimentConfig) -> DensityMatrix:
    if config.initial == INITIAL_STEADY:
        return prepare_steady_state(config)
    return gaussian_density_matrix(config.grid, config.sigma, hbar=config.qbm.hbar)


def run_sequence(config: ExperimentConfig, state: DensityMatrix | None = None,
                 observer=None):
    """Alternate exact-kernel evolution over eps and projection.

    Returns (MomentSeries, survival) where survival is a list of (t, p) with
    p the unnormalized trace after each projection (p(0) after the initial
    projection).  A depleted state terminates the sequence gracefully with
    p=0 recorded for the remaining projection times.

    ``observer(t, pre_state, post_state, report)`` is called at every
    projection (including the initial one, with pre_state=None) for callers
    that need more than the recorded series, e.g. post-projection moments.
    """
    grid = config.grid
    hbar = config.qbm.hbar
    if state is None:
        state = initial_state(config)
    n_proj = int(round(config.total_time / config.eps))

    state, report = apply_projection(state, config.proj, hbar)
    survival = [(0.0, state.trace)]
    series = MomentSeries()
    if observer is not None:
        observer(0.0, None, state, report)

    kern_on = _CachedKernel(grid, config.qbm, config.eps)
    kern_off = _CachedKernel(grid, config.qbm.with_diffusion(0.0), config.eps)

    for k in range(1, n_proj + 1):
        t_prev, t_now = (k - 1) * config.eps, k * config.eps
        t_on = config.env_switch_on_time
        if config.qbm.D == 0 or t_now <= t_on + 1e-12:
            state = kern_off.apply(state)
        elif t_prev >= t_on - 1e-12:
            state = kern_on.apply(state)
        else:  # the switch falls inside this interval
            from .propagators import evolve_kernel

            state = evolve_kernel(state, config.qbm.with_diffusion(0.0), t_on - t_prev)
            state = evolve_kernel(state, config.qbm, t_now - t_on)

        try:
            m = moments(state, hbar)
            series.add(t_now, m.norm, m.x2, m.p2, m.xp_sym,
                       report.p2_red, report.delta_term, report.sigma_term)
            pre = state
            state, report = apply_projection(state, config.proj, hbar)
            survival.append((t_now, state.trace))
            if observer is not None:
                observer(t_now, pre, state, report)
        except DepletedStateError:
            survival.extend((j * config.eps, 0.0) for j in range(k, n_proj + 1))
            break
    return series, survival


def half_life(survival) -> float | None:
    """Linear interpolation of the first crossing of 1/2; None if never."""
    ts = np.array([t for t, _ in survival])
    ps = np.array([p for _, p in survival])
    if ps[0] < 0.5:
        return float(ts[0])
    below = np.nonzero(ps < 0.5)[0]
    if len(below) == 0:
        return None
    j = below[0]
    t0, t1, p0, p1 = ts[j - 1], ts[j], ps[j - 1], ps[j]
    return float(t0 + (0.5 - p0) * (t1 - t0) / (p1 - p0))
