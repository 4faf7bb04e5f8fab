"""Complex absorbing potential equivalent of a projection string.

A string of window projections at spacing eps acts approximately like
continuous evolution with an imaginary potential of height V0 = hbar/eps
outside the region.  The potential is smeared at its edges with the same
profile as the smeared window, V(x) = V0 (1 - g_L(x)), which suppresses
reflection of momenta beyond hbar/a.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .lattice import DensityMatrix, WignerFunction, spectral_derivative
from .projectors import Projector, window_function
from .propagators import QBMParams, evolve_stepper


@dataclass(frozen=True)
class ComplexPotential:
    """Absorber of height V0 outside [-L/2, L/2], edges smeared over a."""

    V0: float
    L: float
    a: float = 0.0

    def __post_init__(self):
        if self.V0 < 0:
            raise ConfigurationError("absorber height must be non-negative")
        if self.L <= 0 or self.a < 0:
            raise ConfigurationError("invalid absorber geometry")

    def window(self) -> Projector:
        return Projector.smeared(self.L, self.a) if self.a > 0 else Projector.sharp(self.L)

    def profile(self, x) -> np.ndarray:
        """V(x) = V0 (1 - g_L(x)): zero inside the region, V0 far outside."""
        return self.V0 * (1.0 - window_function(self.window(), x))


def v0_from_eps(eps: float, hbar: float = 1.0) -> float:
    """Absorber height equivalent to projections at spacing eps: V0 = hbar/eps."""
    if eps <= 0:
        raise ConfigurationError(f"projection spacing must be positive, got {eps}")
    return hbar / eps


def evolve_with_potential(rho: DensityMatrix, pot: ComplexPotential,
                          params: QBMParams, t: float, dt: float) -> DensityMatrix:
    """Integrate the master equation with the absorber switched on.

    The norm is non-increasing (absorption only); with V0 = hbar/eps the
    surviving norm tracks the projection-string survival.
    """
    steps = int(round(t / dt))
    if abs(steps * dt - t) > 1e-9 * max(t, dt):
        raise ConfigurationError(f"t={t} must be an integer multiple of dt={dt}")
    return evolve_stepper(rho, params, pot, dt, steps)


def reflection_estimate(pot: ComplexPotential, p: float, E: float,
                        hbar: float = 1.0) -> float:
    """Order-of-magnitude reflection probability off one smeared absorbing
    step, to lowest order in V0/E: (V0/E)^2 exp(-4 a^2 p^2 / hbar^2).
    O(1) prefactors are deliberately not included."""
    if E <= 0:
        raise ConfigurationError("energy scale must be positive")
    return (pot.V0 / E) ** 2 * float(np.exp(-4.0 * pot.a**2 * p**2 / hbar**2))


def quantum_term_ratio(w: WignerFunction, pot: ComplexPotential,
                       hbar: float = 1.0) -> float:
    """Size of the leading quantum correction in the phase-space transport
    equation relative to the classical absorption term:

        |hbar^2 V''(x) d^2W/dp^2|  vs  |V(x) W|,

    integrated over phase space.  Falls well below 1 once <p^2> is large
    compared to hbar^2/(a L), i.e. once absorption acts classically.
    """
    x = w.x_grid.points
    v = pot.profile(x)
    # analytic second derivative of the smeared profile
    if pot.a == 0:
        raise ConfigurationError("the diagnostic needs a smeared absorber")
    half = pot.L / 2
    bump = lambda u: np.exp(-(u**2) / (2 * pot.a**2)) / np.sqrt(2 * np.pi * pot.a**2)
    vpp = pot.V0 * ((x + half) / pot.a**2 * bump(x + half)
                    - (x - half) / pot.a**2 * bump(x - half))
    d2w = np.real(spectral_derivative(
        spectral_derivative(w.values.astype(complex), axis=0, spacing=w.p_grid.spacing),
        axis=0, spacing=w.p_grid.spacing))
    cell = w.p_grid.spacing * w.x_grid.spacing
    quantum = float(np.sum(np.abs(hbar**2 * vpp[None, :] * d2w)) * cell)
    classical = float(np.sum(np.abs(v[None, :] * w.values)) * cell)
    if classical == 0.0:
        raise ConfigurationError("absorber does not overlap the state")
    return quantum / classical
