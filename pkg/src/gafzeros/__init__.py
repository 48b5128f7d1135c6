"""Zero statistics of random analytic functions.

Simulate random analytic functions psi(z) = sum_j w_j psi_j(z) with i.i.d.
complex Gaussian coefficients, locate their zeros, compute the expected
zero measure in closed form, verify exponential tail and hole-probability
bounds empirically, and recover the scalar-factor / unitary equivalence of
curves sharing the same expected zero measure.
"""

__version__ = "0.1.0"

from .bumps import RadialBump, build_bump
from .deviations import (LEMMA_CONSTANT, TailEstimate, concentration_exact,
                         dimensionless_disk_bound, hole_probability,
                         lemma_check, offord_tail, pointwise_concentration,
                         polynomial_lemma_check, wilson_interval)
from .domains import Disk, PlaneWindow, Rectangle
from .ensembles import (CurveFamily, Ensemble, ExplicitFamily,
                        HyperbolicFamily, KostlanFamily, PlanarFamily,
                        TruncationPolicy, kernel, squared_norm,
                        truncation_order)
from .errors import (BoundaryZeroError, ConfigError, ConvergenceError,
                     DomainError, TruncationError)
from .intensity import (density_closed, density_numeric, laplacian_numeric,
                        mu_against, mu_region)
from .rigidity import (EquivalenceCertificate, KernelModel, PolarizationTable,
                       polarize, recover_equivalence, riesz_compare)
from .sampling import (ComplexGaussianLaw, GafSample, RotationInvariantLaw,
                       draw, polynomial_sample, trial_generator)
from .zeros import (ZeroSet, companion_roots, count_in_region,
                    count_in_region_robust, linear_statistic, locate)

__all__ = [
    "BoundaryZeroError", "ComplexGaussianLaw", "ConfigError",
    "ConvergenceError", "CurveFamily", "Disk", "DomainError", "Ensemble",
    "EquivalenceCertificate", "ExplicitFamily", "GafSample",
    "HyperbolicFamily", "KernelModel", "KostlanFamily", "LEMMA_CONSTANT",
    "PlanarFamily", "PlaneWindow", "PolarizationTable", "RadialBump",
    "Rectangle", "RotationInvariantLaw", "TailEstimate", "TruncationError",
    "TruncationPolicy", "ZeroSet", "build_bump", "companion_roots",
    "concentration_exact", "count_in_region", "count_in_region_robust",
    "density_closed", "density_numeric", "dimensionless_disk_bound", "draw",
    "hole_probability", "kernel", "laplacian_numeric", "lemma_check",
    "linear_statistic", "locate", "mu_against", "mu_region", "offord_tail",
    "pointwise_concentration", "polarize", "polynomial_lemma_check",
    "polynomial_sample", "recover_equivalence", "riesz_compare",
    "squared_norm", "trial_generator", "truncation_order", "wilson_interval",
]
