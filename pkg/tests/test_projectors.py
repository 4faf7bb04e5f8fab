import numpy as np
import pytest
from scipy.special import erfc

from zenodec.errors import ConfigurationError, DepletedStateError
from zenodec.lattice import (DensityMatrix, Grid1D, gaussian_density_matrix,
                             inverse_wigner, spectral_derivative,
                             wigner_transform)
from zenodec.projectors import (MomentumCutoff, Projector, apply_projection,
                                momentum_cutoff, project_wigner,
                                window_function, window_gradient)

ETA = 0.02


def pure_state_from_density(grid, density):
    psi = np.sqrt(density)
    psi = psi / np.sqrt(np.sum(psi**2) * grid.spacing)
    return DensityMatrix(grid, np.outer(psi, psi).astype(complex))


@pytest.fixture
def boundary_state(grid):
    """Steady-state-like profile: boundary density close to 1/L."""
    x = grid.points
    dens = (1 + 0.6 * (2 * x) ** 2) * window_function(Projector.smeared(1.1, 0.03), x)
    return pure_state_from_density(grid, dens)


@pytest.fixture
def plateau_state(grid):
    """Density flat across the region edges (clean 1/a scaling of Sigma)."""
    dens = window_function(Projector.smeared(1.4, 0.05), grid.points)
    return pure_state_from_density(grid, dens)


class TestProjectorValidation:
    def test_bad_parameters(self):
        with pytest.raises(ConfigurationError):
            Projector(0.0, 0.0)
        with pytest.raises(ConfigurationError):
            Projector.smeared(1.0, 0.3)  # a >= L/4
        with pytest.raises(ConfigurationError):
            Projector(1.0, 0.1, "sharp")
        with pytest.raises(ConfigurationError):
            Projector(1.0, 0.0, "gaussian-smeared")


class TestWindowFunction:
    def test_sharp_indicator(self):
        proj = Projector.sharp(1.0)
        assert window_function(proj, 0.0) == 1.0
        assert window_function(proj, 1.0) == 0.0
        assert window_function(proj, 0.5) == 1.0  # closed interval

    def test_smeared_half_at_edges(self):
        proj = Projector.smeared(1.0, ETA)
        assert window_function(proj, 0.5) == pytest.approx(0.5, abs=1e-12)
        assert window_function(proj, -0.5) == pytest.approx(0.5, abs=1e-12)

    def test_smeared_three_widths_out(self):
        a = 0.02
        proj = Projector.smeared(1.0, a)
        val = float(window_function(proj, 0.5 + 3 * a))
        assert val == pytest.approx(0.5 * erfc(3 / np.sqrt(2)), rel=1e-10)
        assert val < 0.01

    def test_converges_to_sharp_window(self):
        sharp = Projector.sharp(1.0)
        smeared = Projector.smeared(1.0, 0.01)  # a = L/100
        x = np.linspace(-1.2, 1.2, 481)
        away = np.abs(np.abs(x) - 0.5) > 0.08  # away from the edges
        diff = np.abs(window_function(smeared, x) - window_function(sharp, x))
        assert np.max(diff[away]) < 1e-12

    def test_gradient_matches_spectral_derivative(self, grid):
        proj = Projector.smeared(1.0, 0.04)
        g = window_function(proj, grid.points)
        spectral = np.real(spectral_derivative(g.astype(complex), axis=0, spacing=ETA))
        analytic = window_gradient(proj, grid.points)
        assert np.max(np.abs(spectral - analytic)) < 1e-8 * np.max(np.abs(analytic))


class TestApplyProjection:
    def test_contained_state_untouched_by_sharp(self, grid):
        rho = gaussian_density_matrix(grid, 0.05)  # supported within [-L/4, L/4]
        projected, rep = apply_projection(rho, Projector.sharp(1.0))
        assert rep.norm_after == pytest.approx(rep.norm_before, abs=1e-10)
        assert abs(rep.sigma_term) < 1e-10

    def test_reference_gaussian_norm_loss(self, rho_in):
        _, rep = apply_projection(rho_in, Projector.sharp(1.0))
        assert rep.norm_before - rep.norm_after < 1e-5
        assert rep.norm_after <= rep.norm_before

    def test_sigma_scale_at_boundary_density(self, boundary_state):
        # boundary density ~ 1/L and a = eta gives Sigma on the scale
        # hbar^2 / (eta L) = 50
        _, rep = apply_projection(boundary_state, Projector.smeared(1.0, ETA))
        assert 25.0 < rep.sigma_term < 100.0
        assert rep.boundary_density == pytest.approx(1.11, rel=0.05)

    def test_decomposition_identity_resolved_smearing(self, grid, rho_in):
        _, rep = apply_projection(rho_in, Projector.smeared(1.0, 0.05))
        total = rep.p2_red + rep.delta_term + rep.sigma_term
        assert rep.p2_after == pytest.approx(total, rel=1e-9)

    def test_decomposition_identity_random_contained_pure_state(self, grid, rng):
        x = grid.points
        psi = np.exp(-(x**2) / (4 * 0.12**2)) * (
            1 + 0.3 * np.cos(9 * x) + 0.2j * np.sin(5 * x))
        rho = DensityMatrix(grid, np.outer(psi, psi.conj()))
        _, rep = apply_projection(rho, Projector.smeared(1.0, 0.05))
        total = rep.p2_red + rep.delta_term + rep.sigma_term
        assert rep.p2_after == pytest.approx(total, rel=1e-9)

    def test_decomposition_consistency_at_lattice_smearing(self, boundary_state):
        # at a = eta the window itself is only marginally band-resolved
        _, rep = apply_projection(boundary_state, Projector.smeared(1.0, ETA))
        total = rep.p2_red + rep.delta_term + rep.sigma_term
        assert rep.p2_after == pytest.approx(total, rel=1e-3)

    def test_delta_much_smaller_than_sigma(self, boundary_state):
        _, rep = apply_projection(boundary_state, Projector.smeared(1.0, ETA))
        assert abs(rep.delta_term) < 0.2 * rep.sigma_term

    def test_sigma_diverges_like_inverse_smearing(self, plateau_state):
        avals = np.array([ETA, 2 * ETA, 4 * ETA, 8 * ETA])
        sig = [apply_projection(plateau_state, Projector.smeared(1.0, a))[1].sigma_term
               for a in avals]
        slope = np.polyfit(np.log(avals), np.log(sig), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.1)

    def test_sharp_projection_idempotent(self, rho_in):
        proj = Projector.sharp(1.0)
        once, _ = apply_projection(rho_in, proj)
        twice, _ = apply_projection(once, proj)
        assert np.array_equal(once.values, twice.values)

    def test_smeared_twice_equals_squared_window(self, rho_in):
        proj = Projector.smeared(1.0, 0.04)
        twice, _ = apply_projection(*apply_projection(rho_in, proj)[:1], proj)
        g = window_function(proj, rho_in.grid.points)
        direct = (g**2)[:, None] * (g**2)[None, :] * rho_in.values
        assert np.max(np.abs(twice.values - direct)) < 1e-12

    def test_norm_monotone_random_states(self, grid, rng):
        x = grid.points
        for _ in range(3):
            psi = rng.normal(size=256) * np.exp(-(x**2) / (2 * 0.5**2))
            rho = DensityMatrix(grid, np.outer(psi, psi).astype(complex))
            _, rep = apply_projection(rho, Projector.smeared(1.0, 0.03))
            assert rep.norm_after <= rep.norm_before + 1e-12
            assert rep.sigma_term >= 0.0
            assert rep.p2_red >= 0.0

    def test_depleted_state_raises(self, grid):
        rho = gaussian_density_matrix(grid, 0.05, x0=2.0)  # far outside the window
        with pytest.raises(DepletedStateError):
            apply_projection(rho, Projector.sharp(1.0))


class TestProjectWigner:
    def test_consistent_with_position_projection(self, rho_in):
        proj = Projector.smeared(1.0, ETA)
        w = wigner_transform(rho_in)
        via_wigner = project_wigner(w, proj)
        via_matrix = wigner_transform(apply_projection(rho_in, proj)[0])
        assert np.max(np.abs(via_wigner.values - via_matrix.values)) < 1e-6

    def test_broad_momentum_state_acts_classically(self, grid):
        # when the momentum width beats the sinc width hbar/(L-2|X|), the
        # projection reduces to plain probability removal
        x = grid.points
        X = (x[:, None] + x[None, :]) / 2
        xi = x[:, None] - x[None, :]
        vals = np.exp(-(X**2) / (2 * 0.35**2) - xi**2 / (2 * 0.02**2)).astype(complex)
        rho = DensityMatrix(grid, vals / (np.real(np.trace(vals)) * grid.spacing))
        w = wigner_transform(rho)
        proj = Projector.sharp(1.0)
        wp = project_wigner(w, proj)
        marg_before = np.sum(w.values, axis=0) * w.p_grid.spacing
        marg_after = np.sum(wp.values, axis=0) * w.p_grid.spacing
        inner = np.abs(x) <= 0.3
        g = window_function(proj, x)
        ratio = marg_after[inner] / (g[inner] * marg_before[inner])
        assert np.max(np.abs(ratio - 1.0)) < 0.02

    def test_zero_input(self, grid):
        w = wigner_transform(DensityMatrix(grid, np.zeros((256, 256), complex)))
        with pytest.raises(DepletedStateError):
            project_wigner(w, Projector.sharp(1.0))


class TestMomentumCutoff:
    def test_reference_value(self):
        cut = momentum_cutoff(0.01, L=1.0, m=1.0, hbar=1.0)
        assert cut == MomentumCutoff(100.0, 0.01)

    def test_lattice_cutoff_same_order(self, grid):
        from zenodec.lattice import lattice_momentum_cutoff

        assert lattice_momentum_cutoff(grid) == pytest.approx(157.08, abs=0.01)

    def test_halving_eps_doubles_cutoff(self):
        assert momentum_cutoff(0.005).p_c == 2 * momentum_cutoff(0.01).p_c

    def test_invalid_eps(self):
        with pytest.raises(ConfigurationError):
            momentum_cutoff(0.0)
