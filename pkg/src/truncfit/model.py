"""Truncated normal in (alpha, psi) form and its conversions.

On a support [y_min, y_max] the density is

    f(y) = exp(-alpha*y - psi*y**2) / Z(alpha, psi)

with Z the integral of the numerator over the support.  psi may be zero
(a truncated exponential, i.e. a power law x**-beta after y = ln x) or even
negative, because the support is bounded.

Conversions:

    mu = -alpha / (2 psi),   sigma = 1 / sqrt(2 psi),   beta = alpha + 1
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import InvalidSigma, OutOfSupport, OverflowBounds, PowerLawLimit
from .quadrature import (
    DEFAULT_QUADRATURE,
    Interval,
    QuadratureConfig,
    shifted_log_normalizer,
    shifted_power_integrals,
)

if TYPE_CHECKING:
    from .estimator import SampleMoments

__all__ = [
    "TruncatedModel",
    "StandardParams",
    "ModelMoments",
    "log_normalizer",
    "log_density",
    "log_likelihood",
    "model_moments",
    "to_standard",
    "from_standard",
    "lognormal_view",
]


@dataclass(frozen=True)
class TruncatedModel:
    alpha: float
    psi: float
    support: Interval

    def __post_init__(self):
        alpha, psi = float(self.alpha), float(self.psi)
        if not (math.isfinite(alpha) and math.isfinite(psi)):
            raise ValueError(f"alpha and psi must be finite, got alpha={alpha}, psi={psi}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "psi", psi)

    @property
    def beta(self) -> float:
        return self.alpha + 1.0


@dataclass(frozen=True)
class StandardParams:
    mu: float
    sigma: float
    beta: float


@dataclass(frozen=True)
class ModelMoments:
    """Raw model moments E(y), E(y^2), E(y^3), E(y^4)."""

    e1: float
    e2: float
    e3: float
    e4: float

    @property
    def variance(self) -> float:
        return self.e2 - self.e1**2

    def jacobian(self) -> np.ndarray:
        """d(E y, E y^2)/d(alpha, psi), exact for the model.

        Rows are (E y, E y^2), columns (alpha, psi).  The matrix is minus the
        covariance of (y, y^2), hence symmetric.
        """
        c11 = self.e2 - self.e1**2
        c12 = self.e3 - self.e1 * self.e2
        c22 = self.e4 - self.e2**2
        return -np.array([[c11, c12], [c12, c22]])


def log_normalizer(m: TruncatedModel, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    return shifted_log_normalizer(m.alpha, m.psi, m.support, cfg)[0]


def log_density(m: TruncatedModel, y, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """log f(y); accepts a scalar or an array.  Endpoints count as inside."""
    arr = np.asarray(y, dtype=float)
    if not m.support.contains(arr):
        raise OutOfSupport(f"value(s) outside support [{m.support.lo}, {m.support.hi}]")
    out = -m.alpha * arr - m.psi * arr**2 - log_normalizer(m, cfg)
    return float(out) if out.ndim == 0 else out


def log_likelihood(
    m: TruncatedModel, moments: "SampleMoments", cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Sum of log f(y_i), computed from the sufficient statistics (n, m1, m2)."""
    return moments.n * (-m.alpha * moments.m1 - m.psi * moments.m2 - log_normalizer(m, cfg))


def model_moments(m: TruncatedModel, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> ModelMoments:
    ints, _ = shifted_power_integrals(m.alpha, m.psi, m.support, cfg)
    e = ints[1:] / ints[0]
    return ModelMoments(*(float(v) for v in e))


def to_standard(m: TruncatedModel) -> StandardParams:
    if not m.psi > 0.0:
        raise PowerLawLimit(beta=m.beta, psi=m.psi)
    return StandardParams(
        mu=-m.alpha / (2.0 * m.psi),
        sigma=1.0 / math.sqrt(2.0 * m.psi),
        beta=m.beta,
    )


def from_standard(mu: float, sigma: float, support: Interval) -> TruncatedModel:
    if not sigma > 0.0:
        raise InvalidSigma(f"sigma must be positive, got {sigma}")
    psi = 1.0 / (2.0 * sigma * sigma)
    return TruncatedModel(alpha=-2.0 * psi * mu, psi=psi, support=support)


def lognormal_view(m: TruncatedModel) -> tuple[float, float, Interval]:
    """(beta, psi, [x_min, x_max]) for a model fitted to y = ln x."""
    try:
        x_lo, x_hi = math.exp(m.support.lo), math.exp(m.support.hi)
    except OverflowError as exc:
        raise OverflowBounds(f"exp({m.support.hi}) is not representable") from exc
    if not x_lo < x_hi:
        raise OverflowBounds(f"support {m.support} collapses after exponentiation")
    return m.beta, m.psi, Interval(x_lo, x_hi)
