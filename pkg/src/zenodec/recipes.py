"""Named data recipes: each reproduces one reference figure or table as CSV.

Every recipe takes the experiment config plus its own recipe.* options,
writes self-describing CSVs into the output directory, and returns the file
list.  Parameter-sweep recipes run their cells independently (no shared
state), so callers may parallelize them; here they run sequentially to keep
outputs bit-reproducible.
"""

from __future__ import annotations

import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .absorbing import ComplexPotential, evolve_with_potential, v0_from_eps
from .classical import find_steady_mode, langevin_oracle, rescale_steady_mode
from .errors import ConfigurationError
from .flux import trace_flux_lines
from .io import RunManifest, config_to_mapping, write_csv
from .lattice import gaussian_density_matrix, moments, wigner_transform
from .models import (GaussianModelParams, SpinModelParams, gaussian_overlap,
                     spin_lindblad_numeric, spin_survival_single,
                     spin_zeno_sequence)
from .projectors import Projector, window_function
from .propagators import QBMParams, evolve_kernel
from .runner import (ExperimentConfig, half_life, prepare_steady_state,
                     run_sequence, timescales)


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _with(config: ExperimentConfig, **kw) -> ExperimentConfig:
    qbm = kw.pop("qbm", None)
    cfg = replace(config, **kw)
    if qbm is not None:
        cfg = replace(cfg, qbm=qbm)
    return cfg


def _env_run(config: ExperimentConfig, collect_post: bool = False):
    """Prepared state, environment on at t=0, observers collecting the
    post-projection moments when asked."""
    post = []

    def observer(t, pre, post_state, rep):
        m = moments(post_state, config.qbm.hbar)
        post.append((t, m.x2, m.p2, m.xp_sym, post_state.trace))

    series, survival = run_sequence(
        _with(config, initial="prepared-steady-state"),
        observer=observer if collect_post else None)
    return series, survival, np.array(post) if post else None


def _meta(config: ExperimentConfig, **extra) -> dict:
    meta = dict(config_to_mapping(config))
    meta.update(extra)
    return meta


def recipe_p2_decomposition(config, opts, outdir):
    d_values = _floats(opts.get("recipe.D_values", "100,4000,20000"))
    total = float(opts.get("recipe.total_time", 0.12))
    files = []
    for dcoef in d_values:
        cfg = _with(config, total_time=total, qbm=config.qbm.with_diffusion(dcoef))
        series, survival, _ = _env_run(cfg)
        cols = series.as_dict()
        cols["survival"] = np.array([p for _, p in survival[1:]])
        files.append(write_csv(
            Path(outdir) / f"p2_decomposition_D{dcoef:g}.csv", cols,
            _meta(cfg, note="renormalized moments prior to each projection; "
                            "decomposition terms from the projection at t")))
    return files


def recipe_steady_moments(config, opts, outdir):
    dcoef = float(opts.get("recipe.D", 20000.0))
    total = float(opts.get("recipe.total_time", 0.12))
    cfg = _with(config, total_time=total, qbm=config.qbm.with_diffusion(dcoef))
    series, survival, post = _env_run(cfg, collect_post=True)
    mode = find_steady_mode()
    classical = rescale_steady_mode(mode, cfg.qbm, cfg.proj.L)
    cols = {
        "t": series.column("t"),
        "x2_pre": series.column("x2"),
        "p2_pre": series.column("p2"),
        "xp_sym_pre": series.column("xp_sym"),
        "x2_post": post[1:, 1],
        "p2_post": post[1:, 2],
        "xp_sym_post": post[1:, 3],
        "survival": post[1:, 4],
    }
    meta = _meta(cfg, classical_x2=classical["x2"], classical_p2=classical["p2"],
                 classical_xp2=classical["xp2"],
                 note="zigzag bounds: pre- and post-projection moments")
    return [write_csv(Path(outdir) / "steady_moments.csv", cols, meta)]


def recipe_steady_wigner(config, opts, outdir):
    dcoef = float(opts.get("recipe.D", 20000.0))
    t_probe = float(opts.get("recipe.time", 0.06))
    cfg = _with(config, total_time=t_probe, qbm=config.qbm.with_diffusion(dcoef))
    holder = {}

    def observer(t, pre, post_state, rep):
        holder["state"] = post_state

    run_sequence(_with(cfg, initial="prepared-steady-state"), observer=observer)
    w = wigner_transform(holder["state"], cfg.qbm.hbar)
    P, X = np.meshgrid(w.p_grid.points, w.x_grid.points, indexing="ij")
    cols = {"p": P.ravel(), "x": X.ravel(), "w": w.values.ravel()}
    return [write_csv(Path(outdir) / "steady_wigner.csv", cols,
                      _meta(cfg, note=f"Wigner function at t={t_probe:g}, "
                                      "post-projection, unnormalized"))]


def recipe_spatial_profiles(config, opts, outdir):
    d_values = _floats(opts.get("recipe.D_values", "100,4000,20000"))
    t_probe = float(opts.get("recipe.time", 0.06))
    cols = {"x": config.grid.points}
    cfg_last = config
    for dcoef in d_values:
        cfg_last = _with(config, total_time=t_probe,
                         qbm=config.qbm.with_diffusion(dcoef))
        holder = {}

        def observer(t, pre, post_state, rep):
            holder["density"] = post_state.diagonal / post_state.trace

        run_sequence(_with(cfg_last, initial="prepared-steady-state"),
                     observer=observer)
        cols[f"density_D{dcoef:g}"] = holder["density"]
    return [write_csv(Path(outdir) / "spatial_profiles.csv", cols,
                      _meta(cfg_last, note="renormalized rho(x,x) right after "
                                           f"the projection at t={t_probe:g}"))]


def recipe_regime_surface(config, opts, outdir):
    d_values = _floats(opts.get("recipe.D_values", "2000,5000,12000,30000,70000"))
    eps_values = _floats(opts.get("recipe.eps_values", "0.002,0.004,0.008,0.016,0.032"))
    rows = {k: [] for k in ("D", "eps", "tau_half", "lambda_inv", "t_E_final",
                            "gap_over_lambda_inv", "regime")}
    for eps in eps_values:
        prep_cfg = _with(config, eps=eps, dt=eps / 4,
                         qbm=config.qbm.with_diffusion(0.0),
                         total_time=max(config.total_time, eps))
        state0 = prepare_steady_state(prep_cfg)
        for dcoef in d_values:
            cfg = _with(prep_cfg, qbm=config.qbm.with_diffusion(dcoef))
            ts = timescales(cfg, moments(state0, cfg.qbm.hbar).p2)
            total = min(40 * ts.lambda_inv, 2.0)
            total = max(eps, round(total / eps) * eps)
            cfg = _with(cfg, total_time=total)
            _, survival = run_sequence(cfg, state=state0)
            tau_half = half_life(survival)
            rows["D"].append(dcoef)
            rows["eps"].append(eps)
            rows["tau_half"].append(np.nan if tau_half is None else tau_half)
            rows["lambda_inv"].append(ts.lambda_inv)
            rows["t_E_final"].append(ts.t_E_final)
            gap = (np.nan if tau_half is None
                   else (tau_half - ts.lambda_inv) / ts.lambda_inv)
            rows["gap_over_lambda_inv"].append(gap)
            from .runner import classify_regime

            rows["regime"].append(classify_regime(ts, eps))
    return [write_csv(Path(outdir) / "regime_surface.csv", rows,
                      _meta(config, note="half-life minus classical decay time "
                                         "across the (D, eps) plane; boundary "
                                         "curve is t_E_final=eps"))]


def recipe_classical_sweeps(config, opts, outdir):
    d_values = _floats(opts.get("recipe.D_values", "5000,10000,20000,40000"))
    l_values = _floats(opts.get("recipe.L_values", "0.8,1.0,1.25"))
    mode = find_steady_mode()
    rows = {k: [] for k in ("sweep", "D", "L", "tau_half", "lambda_inv",
                            "p2_post", "p2_classical")}

    def one(dcoef, L):
        proj = (Projector.sharp(L) if config.proj.kind == "sharp"
                else Projector.smeared(L, config.proj.a))
        qbm = config.qbm.with_diffusion(dcoef)
        lam_inv = (qbm.m**2 * L**2 / dcoef) ** (1.0 / 3.0)
        total = max(config.eps, round(6 * lam_inv / config.eps) * config.eps)
        cfg = _with(config, proj=proj, total_time=total, qbm=qbm)
        series, survival, post = _env_run(cfg, collect_post=True)
        late = post[:, 0] >= 0.5 * total
        resc = rescale_steady_mode(mode, qbm, L)
        return (half_life(survival), lam_inv, float(np.mean(post[late, 2])),
                resc["p2"])

    for dcoef in d_values:
        th, li, p2p, p2c = one(dcoef, 1.0)
        rows["sweep"].append("D")
        rows["D"].append(dcoef)
        rows["L"].append(1.0)
        rows["tau_half"].append(np.nan if th is None else th)
        rows["lambda_inv"].append(li)
        rows["p2_post"].append(p2p)
        rows["p2_classical"].append(p2c)
    for L in l_values:
        th, li, p2p, p2c = one(10000.0, L)
        rows["sweep"].append("L")
        rows["D"].append(10000.0)
        rows["L"].append(L)
        rows["tau_half"].append(np.nan if th is None else th)
        rows["lambda_inv"].append(li)
        rows["p2_post"].append(p2p)
        rows["p2_classical"].append(p2c)
    return [write_csv(Path(outdir) / "classical_sweeps.csv", rows,
                      _meta(config, note="half-life and steady momentum variance "
                                         "against the classical estimates"))]


def _flux_recipe(config, opts, outdir, name, d_value, wide_window):
    total = float(opts.get("recipe.total_time", 0.45))
    n_lines = int(opts.get("recipe.n_lines", 15))
    proj = Projector.sharp(4.8) if wide_window else Projector.sharp(config.proj.L)
    cfg = _with(config, proj=proj, total_time=total,
                qbm=config.qbm.with_diffusion(d_value))
    lines = trace_flux_lines(cfg, n_lines)
    cols = {"t": lines.times}
    for i in range(n_lines):
        cols[f"line_{i:02d}"] = lines.trajectories[:, i]
    f1 = write_csv(Path(outdir) / f"{name}_trajectories.csv", cols,
                   _meta(cfg, max_quantile_drift=lines.max_quantile_drift,
                         note="flux-line positions; NaN after leaving the grid"))
    dens = {"t": lines.times}
    x = cfg.grid.points
    for j in range(0, cfg.n_points, 4):
        dens[f"x_{x[j]:+.2f}"] = lines.densities[:, j]
    f2 = write_csv(Path(outdir) / f"{name}_density.csv", dens,
                   _meta(cfg, note="rho(x,x) history on every 4th lattice point"))
    return [f1, f2]


def recipe_flux_free(config, opts, outdir):
    return _flux_recipe(config, opts, outdir, "flux_free", 0.0, wide_window=True)


def recipe_flux_projected(config, opts, outdir):
    return _flux_recipe(config, opts, outdir, "flux_projected", 0.0, wide_window=False)


def recipe_flux_environment(config, opts, outdir):
    d_values = _floats(opts.get("recipe.D_values", "100,4000"))
    files = []
    for dcoef in d_values:
        files += _flux_recipe(config, opts, outdir, f"flux_environment_D{dcoef:g}",
                              dcoef, wide_window=False)
    return files


def recipe_spin_model(config, opts, outdir):
    omega = float(opts.get("recipe.omega", 1.0))
    d_spin = float(opts.get("recipe.D_spin", 0.5))
    ts = np.linspace(0.0, 3.0, 61)
    cols = {"t": ts}
    for axis in ("x", "y"):
        params = SpinModelParams(omega=omega, D_spin=d_spin, lindblad_axis=axis)
        cols[f"survival_{axis}_closed"] = [spin_survival_single(params, t) for t in ts]
        cols[f"survival_{axis}_numeric"] = [
            float(np.real(spin_lindblad_numeric(params, t, dt=1e-3)[0, 0])) for t in ts]
    f1 = write_csv(Path(outdir) / "spin_survival.csv", cols,
                   _meta(config, omega=omega, D_spin=d_spin))
    eps_grid = np.array([0.4 / n for n in (2, 4, 8, 16, 32, 64)])
    seq = {"eps": eps_grid}
    for d in (0.0, d_spin):
        params = SpinModelParams(omega=omega, D_spin=d)
        seq[f"p_tau_D{d:g}"] = [spin_zeno_sequence(params, e, int(round(0.4 / e)))
                                for e in eps_grid]
    f2 = write_csv(Path(outdir) / "spin_sequence.csv", seq,
                   _meta(config, omega=omega, tau=0.4,
                         note="sequence survival at fixed tau: the Zeno limit "
                              "survives only without the environment"))
    return [f1, f2]


def recipe_gaussian_model(config, opts, outdir):
    dcoef = float(opts.get("recipe.D", 100.0))
    sigma = config.sigma
    params = GaussianModelParams(sigma=sigma, D=dcoef, m=config.qbm.m,
                                 hbar=config.qbm.hbar)
    grid = config.grid
    rho = gaussian_density_matrix(grid, sigma, hbar=config.qbm.hbar)
    x = grid.points
    psi = (2 * np.pi * sigma**2) ** (-0.25) * np.exp(-(x**2) / (4 * sigma**2))
    ts = np.linspace(0.005, 0.05, 10)
    closed, lattice = [], []
    for t in ts:
        closed.append(gaussian_overlap(params, t))
        evolved = evolve_kernel(rho, config.qbm.with_diffusion(dcoef), float(t))
        lattice.append(float(np.real(psi @ evolved.values @ psi) * grid.spacing**2))
    return [write_csv(Path(outdir) / "gaussian_model.csv",
                      {"t": ts, "overlap_closed": closed, "overlap_lattice": lattice},
                      _meta(config, D=dcoef, t_z=params.t_z, t_d=params.t_d))]


def recipe_potential_equivalence(config, opts, outdir):
    d_values = _floats(opts.get("recipe.D_values", "0,100"))
    n_windows = int(opts.get("recipe.n_windows", 5))
    p0 = float(opts.get("recipe.p0", 15.0))
    grid = config.grid
    pot = ComplexPotential(v0_from_eps(config.eps, config.qbm.hbar),
                           config.proj.L, config.proj.a)
    gwin = window_function(config.proj, grid.points)
    rows = {"t": [], "D": [], "survival_string": [], "survival_potential": []}
    for dcoef in d_values:
        qbm = config.qbm.with_diffusion(dcoef)
        state0 = gaussian_density_matrix(grid, config.sigma, x0=-0.2, p0=p0,
                                         hbar=qbm.hbar)
        cfg = _with(config, total_time=n_windows * config.eps, qbm=qbm)
        _, survival = run_sequence(cfg, state=state0)
        state = state0
        for k in range(1, n_windows + 1):
            state = evolve_with_potential(state, pot, qbm, config.eps, config.dt)
            inside = float(np.sum(gwin**2 * state.diagonal) * grid.spacing)
            rows["t"].append(k * config.eps)
            rows["D"].append(dcoef)
            rows["survival_string"].append(survival[k][1])
            rows["survival_potential"].append(inside)
    return [write_csv(Path(outdir) / "potential_equivalence.csv", rows,
                      _meta(config, V0=pot.V0, p0=p0,
                            note="projection string vs V0=hbar/eps absorber"))]


def recipe_classical_mode(config, opts, outdir):
    n_particles = int(opts.get("recipe.n_particles", 50000))
    mode = find_steady_mode()
    mc = langevin_oracle(QBMParams(m=1.0, D=1.0), 1.0, n_particles, 2.5,
                         seed=config.seed, dt=0.005)
    summary = {
        "quantity": ["decay_rate", "x2", "p2", "xp2"],
        "grid_mode": [mode.decay_rate, mode.moments["x2"], mode.moments["p2"],
                      mode.moments["xp2"]],
        "langevin": [np.nan, mc.moments["x2"], mc.moments["p2"], mc.moments["xp2"]],
    }
    f1 = write_csv(Path(outdir) / "classical_mode_summary.csv", summary,
                   _meta(config, n_surviving=mc.n_surviving,
                         note="dimensionless decay mode vs Monte Carlo oracle"))
    shape = mode.shape
    P, X = np.meshgrid(shape.p_grid.points, shape.x_grid.points, indexing="ij")
    f2 = write_csv(Path(outdir) / "classical_mode_shape.csv",
                   {"p_bar": P.ravel(), "x_bar": X.ravel(),
                    "w": shape.values.ravel()},
                   _meta(config, decay_rate=mode.decay_rate))
    return [f1, f2]


RECIPES = {
    "p2-decomposition": recipe_p2_decomposition,
    "steady-moments": recipe_steady_moments,
    "steady-wigner": recipe_steady_wigner,
    "spatial-profiles": recipe_spatial_profiles,
    "regime-surface": recipe_regime_surface,
    "classical-sweeps": recipe_classical_sweeps,
    "flux-free": recipe_flux_free,
    "flux-projected": recipe_flux_projected,
    "flux-environment": recipe_flux_environment,
    "spin-model": recipe_spin_model,
    "gaussian-model": recipe_gaussian_model,
    "potential-equivalence": recipe_potential_equivalence,
    "classical-mode": recipe_classical_mode,
}


def run_recipe(name: str, overrides: dict, outdir) -> RunManifest:
    """Execute one named recipe; writes CSVs plus manifest.json."""
    if name not in RECIPES:
        raise ConfigurationError(
            f"unknown recipe {name!r}; available: {', '.join(sorted(RECIPES))}")
    from .io import config_from_mapping

    config = config_from_mapping(overrides)
    opts = {k: v for k, v in overrides.items() if k.startswith("recipe.")}
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(recipe=name, config=config_to_mapping(config),
                           seed=config.seed)
    start = time.perf_counter()
    files = RECIPES[name](config, opts, outdir)
    manifest.wall_time_s = time.perf_counter() - start
    for f in files:
        manifest.add_output(f)
    manifest.write(outdir)
    return manifest
