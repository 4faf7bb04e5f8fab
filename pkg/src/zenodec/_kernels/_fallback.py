"""Pure-numpy versions of the compiled kernels.

Kept in arithmetic lockstep with ``_core.pyx`` so either backend produces
identical trajectories (same operations, same order, per element).
"""

import numpy as np


def fp_substep(w, scratch, out, vel, dx, dp, dt, diff):
    npts, nx = w.shape
    lam = dt / dx
    nu = vel * lam

    dw = np.diff(w, axis=1)  # dw[:, j] = w[:, j+1] - w[:, j]
    prod = dw[:, :-1] * dw[:, 1:]
    sig = np.zeros_like(w)
    good = prod > 0.0
    # harmonic-mean (van Leer) limited slope per interior cell
    sig[:, 1:-1][good] = 2.0 * prod[good] / (dw[:, :-1] + dw[:, 1:])[good]

    pos = vel >= 0.0
    flux = np.zeros((npts, nx + 1))
    # interfaces j=1..nx-1 between cells j-1 and j; ends stay zero (closed box)
    up = w[pos, :-1] + 0.5 * (1.0 - nu[pos, None]) * sig[pos, :-1]
    flux[pos, 1:-1] = vel[pos, None] * up
    dn = w[~pos, 1:] - 0.5 * (1.0 + nu[~pos, None]) * sig[~pos, 1:]
    flux[~pos, 1:-1] = vel[~pos, None] * dn
    scratch[:] = w - lam * np.diff(flux, axis=1)

    r = diff * dt / (dp * dp)
    out[1:-1] = scratch[1:-1] + r * (scratch[2:] - 2.0 * scratch[1:-1] + scratch[:-2])
    out[0] = scratch[0] + r * (scratch[1] - scratch[0])
    out[-1] = scratch[-1] + r * (scratch[-2] - scratch[-1])


def langevin_chunk(x, p, alive, noise, dt, mass, kick, half_width, survivors):
    dt_over_m = dt / mass
    for s in range(noise.shape[0]):
        live = alive.view(bool)
        x[live] = x[live] + p[live] * dt_over_m
        p[live] = p[live] + kick * noise[s][live]
        absorbed = live & (np.abs(x) > half_width)
        alive[absorbed] = 0
        survivors[s] = int(alive.sum())
