"""Maximum likelihood fitting of truncated normal and lognormal distributions.

Densities are written as exp(-alpha*y - psi*y**2) on a bounded support, with
y = ln x for the lognormal.  psi = 0 is the exponential (power law in x) limit.
"""

from .errors import (
    DegenerateSample,
    DidNotConverge,
    EtaExhausted,
    PowerLawLimit,
    TruncFitError,
)
from .estimator import (
    FitConfig,
    FitReport,
    SampleMoments,
    UpdateCoefficients,
    compute_moments,
    fit,
    fit_exponential,
    initialize,
    step,
    update_coefficients,
)
from .model import (
    ModelMoments,
    StandardParams,
    TruncatedModel,
    from_standard,
    log_density,
    log_likelihood,
    lognormal_view,
    model_moments,
    to_standard,
)
from .quadrature import (
    Interval,
    QuadratureConfig,
    exp_poly_integral,
    shifted_log_normalizer,
)

__version__ = "0.1.0"
