import numpy as np
import pytest

from zenodec.absorbing import (ComplexPotential, evolve_with_potential,
                               quantum_term_ratio, reflection_estimate,
                               v0_from_eps)
from zenodec.errors import ConfigurationError
from zenodec.lattice import (DensityMatrix, gaussian_density_matrix,
                             wigner_transform)
from zenodec.projectors import window_function
from zenodec.propagators import QBMParams, evolve_stepper
from zenodec.runner import ExperimentConfig, run_sequence

EPS = 0.01


class TestV0Relation:
    def test_reference_value(self):
        assert v0_from_eps(0.01) == pytest.approx(100.0, rel=1e-12)

    def test_unit_case(self):
        assert v0_from_eps(1.0) == 1.0

    def test_inverse_proportionality(self):
        assert v0_from_eps(0.005) == 2 * v0_from_eps(0.01)

    def test_invalid_eps(self):
        with pytest.raises(ConfigurationError):
            v0_from_eps(0.0)


class TestEvolveWithPotential:
    def test_zero_height_reduces_to_free_stepper(self, rho_in):
        pot = ComplexPotential(0.0, 1.0, 0.02)
        params = QBMParams(D=100.0)
        with_pot = evolve_with_potential(rho_in, pot, params, 0.01, 0.001)
        without = evolve_stepper(rho_in, params, None, 0.001, 10)
        assert np.max(np.abs(with_pot.values - without.values)) < 1e-12

    def test_norm_non_increasing(self, rho_in):
        pot = ComplexPotential(100.0, 1.0, 0.02)
        state = gaussian_density_matrix(rho_in.grid, 0.1, x0=-0.2, p0=15.0)
        norms = [state.trace]
        for _ in range(5):
            state = evolve_with_potential(state, pot, QBMParams(D=0.0), EPS, 0.001)
            norms.append(state.trace)
        assert np.all(np.diff(norms) < 0)

    @pytest.mark.parametrize("dcoef", [0.0, 100.0])
    def test_matches_projection_string(self, grid, dcoef):
        # head-to-head: string of smeared projections at spacing eps vs the
        # V0 = hbar/eps smeared absorber, survival over a 5 eps window
        pot = ComplexPotential(v0_from_eps(EPS), 1.0, 0.02)
        moving = gaussian_density_matrix(grid, 0.1, x0=-0.2, p0=15.0)
        cfg = ExperimentConfig(qbm=QBMParams(D=dcoef), eps=EPS, total_time=5 * EPS)
        _, surv = run_sequence(cfg, state=moving)
        gwin = window_function(cfg.proj, grid.points)
        state = moving
        for k in range(1, 6):
            state = evolve_with_potential(state, pot, QBMParams(D=dcoef), EPS, 0.001)
            inside = float(np.sum(gwin**2 * state.diagonal) * grid.spacing)
            assert inside == pytest.approx(surv[k][1], rel=0.10)
        assert surv[5][1] < 0.6  # the comparison covers real decay

    def test_reflection_vs_transmission_regimes(self, grid):
        pot = ComplexPotential(500.0, 1.0, 0.02)
        free = QBMParams(D=0.0)
        # E << V0: slow wide packet is reflected back into the region
        slow = gaussian_density_matrix(grid, 0.3, x0=-0.1, p0=5.0)
        for _ in range(5):
            slow = evolve_with_potential(slow, pot, free, 0.01, 0.001)
        # E >> V0: fast packet leaves and is absorbed
        fast = gaussian_density_matrix(grid, 0.05, x0=-0.2, p0=50.0)
        for _ in range(5):
            fast = evolve_with_potential(fast, pot, free, 0.01, 0.001)
        assert slow.trace > 0.75
        assert fast.trace < 0.01
        assert slow.trace > 100 * fast.trace


class TestReflectionEstimate:
    def test_momentum_suppression_at_cutoff(self):
        pot = ComplexPotential(10.0, 1.0, 0.02)
        val = reflection_estimate(pot, p=1.0 / 0.02, E=100.0)
        assert val == pytest.approx((0.1) ** 2 * np.exp(-4.0), rel=1e-12)
        assert np.exp(-4.0) == pytest.approx(0.0183, abs=1e-4)

    def test_sharp_step_has_no_suppression(self):
        pot = ComplexPotential(10.0, 1.0, 0.0)
        assert reflection_estimate(pot, p=50.0, E=100.0) == pytest.approx(0.01, rel=1e-12)

    def test_zero_momentum(self):
        pot = ComplexPotential(10.0, 1.0, 0.02)
        assert reflection_estimate(pot, p=0.0, E=100.0) == pytest.approx(0.01, rel=1e-12)


class TestQuantumTermRatio:
    def test_negligible_for_momentum_broad_states(self, grid):
        # the ratio decreases with <p^2> and is below 0.1 once <p^2> is far
        # above hbar^2/(a L) = 50 (the bound drops O(1) factors, so "far"
        # means a couple of orders here)
        x = grid.points
        X = (x[:, None] + x[None, :]) / 2
        xi = x[:, None] - x[None, :]
        pot = ComplexPotential(100.0, 1.0, 0.02)
        ratios = []
        for c in (0.04, 0.02, 0.01):
            vals = np.exp(-(X**2) / (2 * 0.3**2) - xi**2 / (2 * c**2)).astype(complex)
            rho = DensityMatrix(grid, vals / (np.real(np.trace(vals)) * grid.spacing))
            ratios.append(quantum_term_ratio(wigner_transform(rho), pot))
        assert np.all(np.diff(ratios) < 0)
        assert ratios[1] < 0.1  # <p^2> ~ 2.5e3
        assert ratios[2] < 0.02

    def test_large_for_cold_states(self, rho_in):
        # <p^2> = 25 below the 50 threshold: quantum term is not negligible
        pot = ComplexPotential(100.0, 1.0, 0.02)
        ratio = quantum_term_ratio(wigner_transform(rho_in), pot)
        assert ratio > 0.3
