"""Toolkit for random breather Schrodinger operators on finite boxes.

Assembles H = -Laplacian + sum_j 1_{lambda_j A}(. - j) with reflecting
boundary conditions, estimates spectral statistics by Monte Carlo, and
verifies the ground-state bound chain and the low-energy tail behavior
numerically.
"""

__version__ = "0.1.0"

from .analysis import (BoxChoice, ConcentrationFit, TailFit, bernstein_fit,
                       choose_L, fit_tail, mean_s, proof_tail_constant)
from .discretize import (GAP_COEFF, L_MIN, DiscreteOperator, FreeGap, GridSpec,
                         add_potential, free_counting, free_gap, free_spectrum,
                         neumann_laplacian)
from .eigensolve import (DENSE_LIMIT, SpectralResult, count_eigs_below,
                         dense_eigenvalues, smallest_eigs_dense,
                         smallest_eigs_iterative)
from .kernels import backend_name
from .montecarlo import (EnsembleSpec, IDSCurve, ProbabilityEstimate,
                         concentration_probability, estimate_ids,
                         ground_state_probability, scheduled_ids,
                         wilson_interval)
from .potential import (BaseSet, PotentialField, ScaleDistribution, SiteScales,
                        assemble_field, indicator, load_baseset, s_statistic,
                        sample_scales, save_baseset)
from .thirring import (ThirringReport, closed_form_inner,
                       ground_state_lower_bound, inner_vinv,
                       thirring_lower_bound)

__all__ = [
    "__version__", "backend_name",
    "BaseSet", "PotentialField", "ScaleDistribution", "SiteScales",
    "assemble_field", "indicator", "load_baseset", "save_baseset",
    "sample_scales", "s_statistic",
    "GridSpec", "DiscreteOperator", "FreeGap", "GAP_COEFF", "L_MIN",
    "neumann_laplacian", "add_potential", "free_gap", "free_spectrum",
    "free_counting",
    "SpectralResult", "DENSE_LIMIT", "smallest_eigs_dense",
    "smallest_eigs_iterative", "count_eigs_below", "dense_eigenvalues",
    "ThirringReport", "inner_vinv", "closed_form_inner",
    "thirring_lower_bound", "ground_state_lower_bound",
    "EnsembleSpec", "IDSCurve", "ProbabilityEstimate", "wilson_interval",
    "estimate_ids", "ground_state_probability", "concentration_probability",
    "scheduled_ids",
    "BoxChoice", "ConcentrationFit", "TailFit", "mean_s", "choose_L",
    "bernstein_fit", "fit_tail", "proof_tail_constant",
]
