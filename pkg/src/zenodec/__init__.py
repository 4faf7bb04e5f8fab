"""zenodec: escape of a repeatedly monitored particle from a 1D region.

Density-matrix and Wigner-function evolution under a momentum-diffusion
master equation, window projections (sharp and smeared), complex absorbing
potentials, classical phase-space comparison dynamics, and probability
flux-line diagnostics, with a CLI that reproduces the reference figures as
CSV data.
"""

__version__ = "0.1.0"

from .absorbing import (ComplexPotential, evolve_with_potential,  # noqa: E402,F401
                        quantum_term_ratio, reflection_estimate, v0_from_eps)
from .classical import (LangevinResult, PhaseSpaceDistribution, SteadyMode,  # noqa: F401
                        evolve_classical, find_steady_mode, langevin_oracle,
                        rescale_steady_mode)
from .errors import (ConfigurationError, ConvergenceError,  # noqa: F401
                     DepletedStateError, NumericalError, ZenodecError)
from .flux import (FluxLineSet, VelocityField, current,  # noqa: F401
                   trace_flux_lines, velocity)
from .lattice import (DensityMatrix, Grid1D, Moments, MomentSeries,  # noqa: F401
                      WignerFunction, gaussian_density_matrix, inverse_wigner,
                      moments, momentum_distribution, momentum_grid,
                      wigner_transform)
from .models import (GaussianModelParams, SpinModelParams,  # noqa: F401
                     gaussian_overlap, spin_lindblad_numeric,
                     spin_survival_single, spin_zeno_sequence)
from .projectors import (MomentumCutoff, ProjectionReport, Projector,  # noqa: F401
                         apply_projection, momentum_cutoff, project_wigner,
                         window_function, window_gradient)
from .propagators import (QBMParams, WignerKernelCoeffs, evolve_kernel,  # noqa: F401
                          evolve_stepper, evolve_wigner, wigner_kernel_coeffs)
from .runner import (ExperimentConfig, Timescales, classify_regime,  # noqa: F401
                     cosine_mode_overlap, half_life, prepare_steady_state,
                     regime_boundary_eps, run_sequence, timescales)
