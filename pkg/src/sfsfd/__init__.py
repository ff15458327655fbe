"""Space-filling designs from an optimized, dimension-symmetric sampling pmf."""

from .baselines import SobolState, latin_hypercube_design, sobol_design, uniform_random_design
from .discrepancy import (
    centered_l2_discrepancy,
    centered_l2_discrepancy_batch,
    mean_squared_distance_to_center,
)
from .optimizer import ObjectiveSpec, OptimizationTrace, replicate_schedule, run_sfsfd
from .spectral import (
    angles_to_coefficients,
    coefficients_to_angles,
    coefficients_to_pmf,
    forward_dft,
    inverse_dft,
    sample_design,
    sqrt_transform,
)

__version__ = "0.1.0"
