"""Shape-parameter selection and explicit error bounds for generalized multiquadric
interpolation of band-limited functions.

The kernel is ``h(x) = Gamma(-beta/2) (c**2 + |x|**2)**(beta/2)``. The
package computes the constants behind an exponential-type error bound, the
bounds themselves (in log-domain arithmetic, since they involve terms like
``exp(2 n gamma_n)``), a complete decision procedure for ``c``, and the
interpolation machinery needed to test the bounds numerically.
"""

from .advisor import (
    AdvisorInputs,
    ShapeAdvice,
    advise,
    advise_practical,
    advise_theoretical_fixed,
    advise_theoretical_unfixed,
)
from .bandlimited import (
    BandLimitedFn,
    SpectralDensity,
    l2_norm,
    make_shifted_mixture,
    make_sinc,
    random_mixture,
    spectral_density,
)
from .bounds import (
    BoundBreakdown,
    ProblemSetting,
    bandlimited_error_bound,
    chained_ratio,
    native_error_bound,
    norm_bound_neg_beta,
    norm_bound_pos_beta,
    special_error_bound,
    special_norm_terms,
)
from .constants import (
    TheoremConstants,
    cpd_order,
    feasibility_floor,
    gamma_seq,
    rho_delta0,
    smoothness_constants,
    theorem_constants,
)
from .exceptions import (
    CoverageError,
    DomainError,
    FillDistanceError,
    IllConditionedError,
    MQShapeError,
    NumericalError,
    QuadratureError,
    RankDeficiencyError,
)
from .interpolator import (
    CenterSet,
    InterpolationModel,
    evaluate,
    fill_distance,
    grid_centers,
    poly_basis,
    solve_interpolant,
)
from .kernel import KernelSpec, kernel_eval, validate_spec
from .numerics import LogScalar, PrecisionPolicy, log_combine

__version__ = "0.1.0"
