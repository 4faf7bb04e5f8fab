# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the classical phase-space solver and the
Langevin Monte Carlo sampler.

These mirror the pure-numpy implementations in ``_fallback.py`` operation
for operation; the backend selection happens in ``zenodec._kernels``.
"""

from libc.math cimport fabs

import numpy as np

cimport numpy as cnp

cnp.import_array()


def fp_substep(double[:, ::1] w, double[:, ::1] scratch, double[:, ::1] out,
               double[::1] vel, double dx, double dp, double dt, double diff):
    """One advection (x, per-row constant velocity) + diffusion (p) substep.

    Van Leer flux-limited upwind advection along axis 1, closed-box
    boundaries (zero flux); forward-Euler diffusion along axis 0 with
    zero-flux ends.  Caller guarantees |v| dt/dx <= 1 and diff*dt/dp^2 <= 0.5.
    """
    cdef Py_ssize_t npts = w.shape[0]
    cdef Py_ssize_t nx = w.shape[1]
    cdef Py_ssize_t k, j
    cdef double v, nu, lam, a, b, sig, fprev, fcur, r

    lam = dt / dx
    for k in range(npts):
        v = vel[k]
        nu = v * lam
        fprev = 0.0  # closed left end
        if v >= 0.0:
            for j in range(1, nx):
                b = w[k, j] - w[k, j - 1]
                a = w[k, j - 1] - w[k, j - 2] if j >= 2 else 0.0
                sig = 2.0 * a * b / (a + b) if a * b > 0.0 else 0.0
                fcur = v * (w[k, j - 1] + 0.5 * (1.0 - nu) * sig)
                scratch[k, j - 1] = w[k, j - 1] - lam * (fcur - fprev)
                fprev = fcur
            scratch[k, nx - 1] = w[k, nx - 1] - lam * (0.0 - fprev)
        else:
            for j in range(1, nx):
                b = w[k, j] - w[k, j - 1]
                a = w[k, j + 1] - w[k, j] if j <= nx - 2 else 0.0
                sig = 2.0 * a * b / (a + b) if a * b > 0.0 else 0.0
                fcur = v * (w[k, j] - 0.5 * (1.0 + nu) * sig)
                scratch[k, j - 1] = w[k, j - 1] - lam * (fcur - fprev)
                fprev = fcur
            scratch[k, nx - 1] = w[k, nx - 1] - lam * (0.0 - fprev)

    r = diff * dt / (dp * dp)
    for j in range(nx):
        out[0, j] = scratch[0, j] + r * (scratch[1, j] - scratch[0, j])
    for k in range(1, npts - 1):
        for j in range(nx):
            out[k, j] = scratch[k, j] + r * (scratch[k + 1, j]
                                             - 2.0 * scratch[k, j]
                                             + scratch[k - 1, j])
    for j in range(nx):
        out[npts - 1, j] = scratch[npts - 1, j] + r * (scratch[npts - 2, j]
                                                       - scratch[npts - 1, j])


def langevin_chunk(double[::1] x, double[::1] p, cnp.uint8_t[::1] alive,
                   double[:, ::1] noise, double dt, double mass,
                   double kick, double half_width, cnp.int64_t[::1] survivors):
    """Euler-Maruyama steps for free momentum-diffusing particles.

    Per step: x += (p/m) dt with the pre-step momentum, then p += kick*xi,
    then absorb at |x| > half_width.  ``survivors[s]`` receives the number
    of live particles after step s.
    """
    cdef Py_ssize_t nsteps = noise.shape[0]
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t s, i
    cdef double dt_over_m = dt / mass
    cdef cnp.int64_t count

    for s in range(nsteps):
        count = 0
        for i in range(n):
            if alive[i]:
                x[i] = x[i] + p[i] * dt_over_m
                p[i] = p[i] + kick * noise[s, i]
                if fabs(x[i]) > half_width:
                    alive[i] = 0
                else:
                    count += 1
        survivors[s] = count
