"""Position and phase-space lattices, state containers, transforms, moments.

Conventions used throughout the package:

* ``DensityMatrix.values[i, j]`` is rho(x_i, y_j) with x_i = (i - n//2) * eta.
* ``WignerFunction.values[k, i]`` is W(p_k, X_i) with p_k on the conjugate
  lattice of spacing 2*pi*hbar/(n*eta).
* The discrete Wigner transform works on the skew diagonals of the density
  matrix: row d collects the matrix elements with separation xi = d*eta.
  For odd d those elements sit at centre coordinate X + eta/2; they are
  carried under the label X, which keeps the transform exactly invertible
  and keeps every momentum sum identical to the spectral one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DepletedStateError

EDGE_DECAY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class Grid1D:
    """Uniform origin-centred lattice: point i at (i - n_points//2) * spacing."""

    n_points: int
    spacing: float

    def __post_init__(self):
        if self.n_points < 8:
            raise ConfigurationError(f"grid needs >= 8 points, got {self.n_points}")
        if self.spacing <= 0:
            raise ConfigurationError(f"grid spacing must be positive, got {self.spacing}")

    @property
    def points(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.spacing

    @property
    def length(self) -> float:
        return self.n_points * self.spacing


def momentum_grid(grid: Grid1D, hbar: float = 1.0) -> Grid1D:
    """Conjugate momentum lattice: spacing 2*pi*hbar/(n*eta), same point count."""
    return Grid1D(grid.n_points, 2.0 * np.pi * hbar / (grid.n_points * grid.spacing))


def lattice_momentum_cutoff(grid: Grid1D, hbar: float = 1.0) -> float:
    """Largest momentum representable on the lattice, pi*hbar/eta."""
    return np.pi * hbar / grid.spacing


def centered_fft(a: np.ndarray, axis: int = 0) -> np.ndarray:
    """DFT with symmetric index ranges: A[k] = sum_m a[m] exp(-2i pi k m / n),
    k and m both running over -n//2 .. n//2 - 1."""
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(a, axes=axis), axis=axis), axes=axis)


def centered_ifft(a: np.ndarray, axis: int = 0) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(a, axes=axis), axis=axis), axes=axis)


def spectral_derivative(values: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """d/dx via the centred Fourier multiplier i*kappa."""
    n = values.shape[axis]
    kappa = 2.0 * np.pi * (np.arange(n) - n // 2) / (n * spacing)
    shape = [1] * values.ndim
    shape[axis] = n
    mult = (1j * kappa).reshape(shape)
    return centered_ifft(mult * centered_fft(values, axis=axis), axis=axis)


@dataclass(frozen=True)
class DensityMatrix:
    grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        n = self.grid.n_points
        if self.values.shape != (n, n):
            raise ConfigurationError(
                f"density matrix shape {self.values.shape} does not match grid n={n}")

    @property
    def diagonal(self) -> np.ndarray:
        """rho(x, x), the spatial probability density."""
        return np.real(np.diagonal(self.values))

    @property
    def trace(self) -> float:
        return float(np.real(np.sum(np.diagonal(self.values))) * self.grid.spacing)

    def hermiticity_defect(self) -> float:
        scale = np.max(np.abs(self.values)) or 1.0
        return float(np.max(np.abs(self.values - self.values.conj().T)) / scale)

    def edge_occupancy(self) -> float:
        """Largest boundary magnitude relative to the matrix maximum."""
        v = np.abs(self.values)
        edge = max(v[0, :].max(), v[-1, :].max(), v[:, 0].max(), v[:, -1].max())
        return float(edge / (v.max() or 1.0))

    def positivity_defect(self) -> float:
        """max(0, -lambda_min/lambda_max) of the discretized operator.

        Diagnostic only (a full eigendecomposition); physical states stay
        below ~1e-8."""
        eigs = np.linalg.eigvalsh(self.values)
        return float(max(0.0, -eigs[0] / eigs[-1]))


@dataclass(frozen=True)
class WignerFunction:
    x_grid: Grid1D
    p_grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if self.values.shape != (self.p_grid.n_points, self.x_grid.n_points):
            raise ConfigurationError("Wigner values shape does not match grids")

    @property
    def mass(self) -> float:
        return float(np.sum(self.values) * self.p_grid.spacing * self.x_grid.spacing)


def gaussian_density_matrix(grid: Grid1D, sigma: float, x0: float = 0.0,
                            p0: float = 0.0, hbar: float = 1.0) -> DensityMatrix:
    """Pure Gaussian state of width sigma, optionally displaced and boosted."""
    x = grid.points
    psi = (2.0 * np.pi * sigma**2) ** (-0.25) * np.exp(
        -((x - x0) ** 2) / (4.0 * sigma**2) + 1j * p0 * x / hbar)
    return DensityMatrix(grid, np.outer(psi, psi.conj()))


@lru_cache(maxsize=8)
def _skew_indices(n: int):
    """Index pair mapping rho[i, j] onto rows of fixed separation d = i - j."""
    d = (np.arange(n) - n // 2)[:, None]
    i = np.arange(n)[None, :]
    rows = (i + (d + 1) // 2) % n
    cols = (i - d // 2) % n
    return rows, cols


def skew_diagonals(rho: DensityMatrix) -> np.ndarray:
    """C[d, i] = rho at separation xi = (d - n//2)*eta around centre x_i."""
    rows, cols = _skew_indices(rho.grid.n_points)
    return rho.values[rows, cols]


def _scatter_skew(c: np.ndarray) -> np.ndarray:
    n = c.shape[0]
    rows, cols = _skew_indices(n)
    out = np.empty((n, n), dtype=complex)
    out[rows, cols] = c
    return out


def wigner_transform(rho: DensityMatrix, hbar: float = 1.0) -> WignerFunction:
    """W(p, X) = (1/2 pi hbar) integral dxi exp(-i p xi/hbar) rho(X+xi/2, X-xi/2).

    The p-marginal reproduces rho(x, x) exactly and the double sum times
    dp*dX equals the trace exactly; the transform is exactly invertible.
    """
    n = rho.grid.n_points
    if n % 2:
        raise ConfigurationError("Wigner transform needs an even grid size")
    eta = rho.grid.spacing
    c = skew_diagonals(rho)
    w = (eta / (2.0 * np.pi * hbar)) * centered_fft(c, axis=0)
    return WignerFunction(rho.grid, momentum_grid(rho.grid, hbar),
                          np.ascontiguousarray(w.real), rho.time)


def inverse_wigner(w: WignerFunction, hbar: float = 1.0) -> DensityMatrix:
    """Exact inverse of :func:`wigner_transform` on a compatible lattice."""
    n = w.x_grid.n_points
    expected = 2.0 * np.pi * hbar / (n * w.x_grid.spacing)
    if w.p_grid.n_points != n or not np.isclose(w.p_grid.spacing, expected, rtol=1e-9):
        raise ConfigurationError("Wigner lattice is not conjugate to the position lattice")
    eta = w.x_grid.spacing
    c = (2.0 * np.pi * hbar / eta) * centered_ifft(w.values.astype(complex), axis=0)
    return DensityMatrix(w.x_grid, _scatter_skew(c), w.time)


def momentum_distribution(rho: DensityMatrix, hbar: float = 1.0):
    """Diagonal of rho in the momentum representation.

    Returns (p, q) with sum(q) * dp equal to the trace; q is real and
    non-negative for positive semidefinite rho.
    """
    n = rho.grid.n_points
    eta = rho.grid.spacing
    s = skew_diagonals(rho).sum(axis=1)
    q = (eta**2 / (2.0 * np.pi * hbar)) * centered_fft(s)
    pgrid = momentum_grid(rho.grid, hbar)
    return pgrid.points, q.real


@dataclass(frozen=True)
class Moments:
    norm: float
    x2: float
    p2: float
    xp_sym: float


def moments(rho: DensityMatrix, hbar: float = 1.0) -> Moments:
    """Norm and the renormalized second moments <x^2>, <p^2>, <xp+px>.

    <p^2> is the spectral momentum-basis second moment, so it is finite and
    cut off at the lattice momentum pi*hbar/eta.
    """
    norm = rho.trace
    if norm < 1e-12:
        raise DepletedStateError(f"trace {norm:.3e} below usable floor")
    eta = rho.grid.spacing
    x = rho.grid.points
    x2 = float(np.sum(x**2 * rho.diagonal) * eta / norm)

    p, q = momentum_distribution(rho, hbar)
    p2 = float(np.sum(p**2 * q) * (p[1] - p[0]) / norm)

    drho_dx = spectral_derivative(rho.values, axis=0, spacing=eta)
    tr_xp = np.sum(x * (-1j * hbar) * np.diagonal(drho_dx)) * eta
    xp_sym = float(2.0 * np.real(tr_xp) / norm)
    return Moments(norm=norm, x2=x2, p2=p2, xp_sym=xp_sym)


def warn_if_edge_leak(rho: DensityMatrix, where: str) -> None:
    occ = rho.edge_occupancy()
    if occ > EDGE_DECAY_THRESHOLD:
        warnings.warn(
            f"{where}: state magnitude at the box edge is {occ:.2e} of the peak; "
            "periodic wrap may contaminate the evolution", RuntimeWarning, stacklevel=3)


class MomentSeries:
    """Time-stamped record of norm, second moments and the per-projection
    <p^2> decomposition terms (recorded immediately prior to each projection)."""

    FIELDS = ("t", "norm", "x2", "p2", "xp_sym", "p2_red", "delta_term", "sigma_term")

    def __init__(self):
        self._rows: list[tuple] = []

    def add(self, t, norm, x2, p2, xp_sym, p2_red=np.nan, delta_term=np.nan,
            sigma_term=np.nan) -> None:
        if self._rows and t <= self._rows[-1][0]:
            raise ConfigurationError("moment records must be strictly increasing in t")
        self._rows.append((t, norm, x2, p2, xp_sym, p2_red, delta_term, sigma_term))

    def __len__(self) -> int:
        return len(self._rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[self.FIELDS.index(name)] for row in self._rows])

    def as_dict(self) -> dict[str, np.ndarray]:
        return {name: self.column(name) for name in self.FIELDS}
