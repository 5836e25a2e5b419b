"""Maximum likelihood fit of the truncated normal by moment matching.

The likelihood is stationary exactly when the model moments equal the sample
moments, E(y) = mean(y) and E(y^2) = mean(y^2).  The iteration moves

    (alpha, psi) += eta * K @ (mean(y) - E(y), mean(y^2) - E(y^2))

where K = [[a, b], [b, c]] is the inverse of the moment Jacobian with the
model's third and fourth moments replaced by the sample's.  K therefore depends
only on the data and is computed once per fit (:func:`update_coefficients`).
Only the model expectations are recomputed each step, by quadrature.

``fit_exponential`` is the same scheme with psi pinned at 0, i.e. the
truncated exponential in y, or the truncated power law in x = exp(y).
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .errors import (
    DegenerateSample,
    DidNotConverge,
    EmptySample,
    EtaExhausted,
    MomentsOutsideSupport,
    NonFiniteValue,
    PowerLawLimit,
    QuadratureError,
    StepOverflow,
)
from .model import (
    StandardParams,
    TruncatedModel,
    log_likelihood,
    model_moments,
    to_standard,
)
from .quadrature import DEFAULT_QUADRATURE, Interval, QuadratureConfig

__all__ = [
    "SampleMoments",
    "UpdateCoefficients",
    "FitConfig",
    "FitReport",
    "compute_moments",
    "update_coefficients",
    "initialize",
    "step",
    "fit",
    "fit_exponential",
]

log = logging.getLogger(__name__)

ETA_FLOOR = 1e-6
MIN_FIT_SIZE = 3
STALL_WINDOW = 100
STALL_RATIO = 0.99
STALL_NET_FRACTION = 0.5


@dataclass(frozen=True)
class SampleMoments:
    """Sample size and the first four raw sample moments."""

    n: int
    m1: float
    m2: float
    m3: float
    m4: float

    def __post_init__(self):
        if self.n < 1:
            raise EmptySample("sample moments need n >= 1")
        if not all(math.isfinite(v) for v in (self.m1, self.m2, self.m3, self.m4)):
            raise NonFiniteValue(f"non-finite sample moments: {self}")

    @property
    def variance(self) -> float:
        return self.m2 - self.m1**2

    def covariance(self) -> np.ndarray:
        """Sample covariance of the pair (y, y^2)."""
        c12 = self.m3 - self.m1 * self.m2
        return np.array([[self.m2 - self.m1**2, c12], [c12, self.m4 - self.m2**2]])


@dataclass(frozen=True)
class UpdateCoefficients:
    a: float
    b: float
    c: float
    h: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.b, self.c]])


@dataclass(frozen=True)
class FitConfig:
    eta: float = 0.33
    tol_alpha: float = 1e-8
    tol_psi: float = 1e-8
    max_iterations: int = 10_000
    eta_backoff_factor: float = 0.5
    init_override: tuple[float, float] | None = None

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if not (self.tol_alpha > 0.0 and self.tol_psi > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0.0 < self.eta_backoff_factor < 1.0:
            raise ValueError(f"eta_backoff_factor must lie in (0, 1), got {self.eta_backoff_factor}")


@dataclass(frozen=True)
class FitReport:
    model: TruncatedModel
    standard: StandardParams | None
    converged: bool
    iterations: int
    final_step: tuple[float, float]
    log_likelihood: float
    moment_residuals: tuple[float, float]
    eta_used: float
    n: int
    total_iterations: int = 0

    @property
    def alpha(self) -> float:
        return self.model.alpha

    @property
    def psi(self) -> float:
        return self.model.psi


def compute_moments(sample: Iterable[float]) -> SampleMoments:
    y = np.asarray(list(sample) if not isinstance(sample, np.ndarray) else sample, dtype=float).ravel()
    if y.size == 0:
        raise EmptySample("cannot compute moments of an empty sample")
    if not np.all(np.isfinite(y)):
        raise NonFiniteValue("sample contains non-finite values")
    y2 = y * y
    return SampleMoments(
        n=int(y.size),
        m1=float(np.mean(y)),
        m2=float(np.mean(y2)),
        m3=float(np.mean(y2 * y)),
        m4=float(np.mean(y2 * y2)),
    )


def update_coefficients(s: SampleMoments) -> UpdateCoefficients:
    """Step coefficients a, b, c and the determinant-like term h.

    h is minus the determinant of the sample covariance of (y, y^2), so it is
    negative whenever the sample has three or more distinct values.  The
    degeneracy threshold is absolute for samples with m2 < 1, so data on a very
    small scale should be rescaled before fitting.
    """
    m1, m2, m3, m4 = s.m1, s.m2, s.m3, s.m4
    h = m4 * (m1 * m1 - m2) + m3 * (m3 - 2.0 * m1 * m2) + m2**3
    if not math.isfinite(h) or abs(h) <= 1e-12 * max(1.0, m2**3):
        raise DegenerateSample(
            f"covariance of (y, y^2) is singular (h = {h:g}); need at least 3 distinct values"
        )
    return UpdateCoefficients(
        a=(m4 - m2 * m2) / h,
        b=(m1 * m2 - m3) / h,
        c=(m2 - m1 * m1) / h,
        h=h,
    )


def initialize(s: SampleMoments) -> tuple[float, float]:
    """Untruncated normal MLE, written as (alpha, psi)."""
    v = s.variance
    if v <= 1e-14 * max(1.0, s.m2):
        raise DegenerateSample(f"sample variance {v:g} is zero to working precision")
    return -s.m1 / v, 1.0 / (2.0 * v)


def _expectations(alpha, psi, support, cfg):
    try:
        e = model_moments(TruncatedModel(alpha, psi, support), cfg)
    except (QuadratureError, ValueError) as exc:
        raise StepOverflow(f"model moments failed at alpha={alpha}, psi={psi}: {exc}") from exc
    return e


def step(
    alpha_j: float,
    psi_j: float,
    s: SampleMoments,
    coef: UpdateCoefficients,
    eta: float,
    support: Interval,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> tuple[float, float, tuple[float, float]]:
    """One update; returns (delta_alpha, delta_psi, (r1, r2))."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    e = _expectations(alpha_j, psi_j, support, cfg)
    r1 = s.m1 - e.e1
    r2 = s.m2 - e.e2
    d_alpha = eta * (coef.a * r1 + coef.b * r2)
    d_psi = eta * (coef.b * r1 + coef.c * r2)
    if not all(math.isfinite(v) for v in (r1, r2, d_alpha, d_psi)):
        raise StepOverflow(f"non-finite step at alpha={alpha_j}, psi={psi_j}")
    return d_alpha, d_psi, (r1, r2)


def _check_fit_inputs(s: SampleMoments, support: Interval) -> None:
    if s.n < MIN_FIT_SIZE:
        raise DegenerateSample(f"need at least {MIN_FIT_SIZE} observations, got {s.n}")
    if not support.lo <= s.m1 <= support.hi:
        raise MomentsOutsideSupport(f"sample mean {s.m1} lies outside {support}")
    if math.sqrt(max(s.m2, 0.0)) > max(abs(support.lo), abs(support.hi)):
        raise MomentsOutsideSupport(f"sqrt(m2) = {math.sqrt(s.m2)} exceeds the support hull {support}")


def _report(alpha, psi, support, s, cfg, *, converged, iterations, last_step, eta):
    model = TruncatedModel(alpha, psi, support)
    e = _expectations(alpha, psi, support, cfg)
    try:
        standard = to_standard(model)
    except PowerLawLimit:
        standard = None
    return FitReport(
        model=model,
        standard=standard,
        converged=converged,
        iterations=iterations,
        final_step=last_step,
        log_likelihood=log_likelihood(model, s, cfg),
        moment_residuals=(s.m1 - e.e1, s.m2 - e.e2),
        eta_used=eta,
        n=s.n,
    )


class _Stalled(StepOverflow):
    pass


class _StallMonitor:
    """Flags an iteration that circles the solution instead of approaching it.

    Steps are grouped in windows.  A window is a stall when its largest step
    is not at least 1% below the previous window's and the steps mostly cancel
    (net displacement under half the path length).  Steady crawling from a
    distant start has large net displacement and is left alone.
    """

    def __init__(self, tol_alpha: float, tol_psi: float):
        self.scale = np.array([tol_alpha, tol_psi])
        self.prev_max = math.inf
        self._reset()

    def _reset(self):
        self.cur_max = 0.0
        self.path = 0.0
        self.net = np.zeros(2)
        self.count = 0

    def update(self, d_alpha: float, d_psi: float) -> None:
        d = np.array([d_alpha, d_psi]) / self.scale
        size = float(np.hypot(*d))
        self.cur_max = max(self.cur_max, size)
        self.path += size
        self.net += d
        self.count += 1
        if self.count == STALL_WINDOW:
            cycling = np.hypot(*self.net) < STALL_NET_FRACTION * self.path
            if cycling and self.cur_max > STALL_RATIO * self.prev_max:
                raise _Stalled(f"steps stopped shrinking (window max {self.cur_max:.3g} x tol)")
            self.prev_max = self.cur_max
            self._reset()


def _run_with_backoff(attempt, start, fit_cfg: FitConfig) -> FitReport:
    # Restart from `start` with a smaller eta whenever an attempt overflows or
    # stalls.  `attempt` returns (report, iterations used).
    eta = fit_cfg.eta
    spent = 0
    while True:
        try:
            report = attempt(start, eta)
        except StepOverflow as exc:
            spent += getattr(exc, "iterations", 0)
            new_eta = eta * fit_cfg.eta_backoff_factor
            log.info("eta=%g failed (%s); restarting with eta=%g", eta, exc, new_eta)
            if new_eta < ETA_FLOOR:
                raise EtaExhausted(f"eta fell below {ETA_FLOOR:g} without a finite fit") from exc
            eta = new_eta
            continue
        return replace(report, total_iterations=spent + report.iterations)


def _warn_unconverged(report: FitReport) -> FitReport:
    if not report.converged:
        warnings.warn(
            f"no convergence after {report.iterations} iterations "
            f"(last step {report.final_step[0]:.3g}, {report.final_step[1]:.3g})",
            DidNotConverge,
            stacklevel=3,
        )
    return report


def fit(
    s: SampleMoments,
    support: Interval,
    fit_cfg: FitConfig = FitConfig(),
    quad_cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> FitReport:
    """Fit (alpha, psi) by the moment-matching iteration.

    Stops once |delta_alpha| < tol_alpha and |delta_psi| < tol_psi.  If the
    iteration hits a non-finite value, or its steps stop shrinking (a cycle
    around the solution), eta is multiplied by ``eta_backoff_factor`` and the
    iteration restarts from the initial point.  ``iterations`` in the report
    counts the final attempt, ``total_iterations`` all attempts.
    A report with ``converged=False`` (and a :class:`DidNotConverge` warning)
    is returned when ``max_iterations`` runs out.
    """
    _check_fit_inputs(s, support)
    coef = update_coefficients(s)
    start = fit_cfg.init_override if fit_cfg.init_override is not None else initialize(s)

    def attempt(start, eta):
        alpha, psi = map(float, start)
        last = (math.inf, math.inf)
        monitor = _StallMonitor(fit_cfg.tol_alpha, fit_cfg.tol_psi)
        it = 0
        try:
            for it in range(1, fit_cfg.max_iterations + 1):
                d_alpha, d_psi, _ = step(alpha, psi, s, coef, eta, support, quad_cfg)
                alpha += d_alpha
                psi += d_psi
                if not (math.isfinite(alpha) and math.isfinite(psi)):
                    raise StepOverflow("parameters left the representable range")
                last = (d_alpha, d_psi)
                if abs(d_alpha) < fit_cfg.tol_alpha and abs(d_psi) < fit_cfg.tol_psi:
                    return _report(alpha, psi, support, s, quad_cfg, converged=True,
                                   iterations=it, last_step=last, eta=eta)
                monitor.update(d_alpha, d_psi)
        except StepOverflow as exc:
            exc.iterations = it
            raise
        return _report(alpha, psi, support, s, quad_cfg, converged=False,
                       iterations=fit_cfg.max_iterations, last_step=last, eta=eta)

    return _warn_unconverged(_run_with_backoff(attempt, start, fit_cfg))


def _exponential_start(s: SampleMoments, support: Interval) -> float:
    # one-sided exponential MLE measured from whichever end the mean is closer to
    mid = 0.5 * (support.lo + support.hi)
    if s.m1 < mid:
        return 1.0 / (s.m1 - support.lo)
    if s.m1 > mid:
        return -1.0 / (support.hi - s.m1)
    return 0.0


def fit_exponential(
    s: SampleMoments,
    support: Interval,
    fit_cfg: FitConfig = FitConfig(),
    quad_cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> FitReport:
    """Fit alpha with psi held at 0 (truncated exponential / power law).

    Uses the one-parameter version of the same update,
    delta_alpha = eta * (m1 - E(y)) / -(m2 - m1^2).
    """
    _check_fit_inputs(s, support)
    v = s.variance
    if v <= 1e-14 * max(1.0, s.m2):
        raise DegenerateSample(f"sample variance {v:g} is zero to working precision")
    if fit_cfg.init_override is not None:
        start = (float(fit_cfg.init_override[0]), 0.0)
    else:
        start = (_exponential_start(s, support), 0.0)

    def attempt(start, eta):
        alpha = start[0]
        last = (math.inf, 0.0)
        monitor = _StallMonitor(fit_cfg.tol_alpha, fit_cfg.tol_psi)
        it = 0
        try:
            for it in range(1, fit_cfg.max_iterations + 1):
                e = _expectations(alpha, 0.0, support, quad_cfg)
                d_alpha = eta * (s.m1 - e.e1) / -v
                if not math.isfinite(d_alpha):
                    raise StepOverflow(f"non-finite step at alpha={alpha}")
                alpha += d_alpha
                if not math.isfinite(alpha):
                    raise StepOverflow("alpha left the representable range")
                last = (d_alpha, 0.0)
                if abs(d_alpha) < fit_cfg.tol_alpha:
                    return _report(alpha, 0.0, support, s, quad_cfg, converged=True,
                                   iterations=it, last_step=last, eta=eta)
                monitor.update(d_alpha, 0.0)
        except StepOverflow as exc:
            exc.iterations = it
            raise
        return _report(alpha, 0.0, support, s, quad_cfg, converged=False,
                       iterations=fit_cfg.max_iterations, last_step=last, eta=eta)

    return _warn_unconverged(_run_with_backoff(attempt, start, fit_cfg))
