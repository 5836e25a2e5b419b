"""Integrals of u**k * exp(-alpha*u - psi*u**2) over a finite interval.

These are the only integrals the truncated normal needs: k = 0 is the
normalizer, k = 1..4 give the raw moments.  The integrand is always evaluated
relative to its maximum over the interval (the "shift"), so that arguments far
outside the usual range, e.g. alpha = -1000 on [0, 1], stay finite.

Integration is composite Gauss-Legendre on uniform panels with panel doubling
until successive results agree to ``rel_tolerance``.  Before integrating, the
interval is clipped to the region where the shifted exponent is above
``-LEVEL_DROP``; what is discarded is below exp(-80) of the peak and cannot be
seen in double precision, while the clipping keeps very narrow peaks inside
very wide intervals resolvable with a modest number of panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IntegrandOverflow, NonFiniteInput, ToleranceNotReached

__all__ = [
    "Interval",
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "exponent_shift",
    "exp_poly_integral",
    "shifted_power_integrals",
    "shifted_log_normalizer",
]

LEVEL_DROP = 80.0
MAX_DOUBLINGS = 12
MAX_POWER = 4


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with finite lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise NonFiniteInput(f"interval bounds must be finite, got [{lo}, {hi}]")
        if not lo < hi:
            raise ValueError(f"interval needs lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, y) -> bool:
        y = np.asarray(y, dtype=float)
        return bool(np.all((y >= self.lo) & (y <= self.hi)))

    def shifted(self, t: float) -> "Interval":
        return Interval(self.lo + t, self.hi + t)


@dataclass(frozen=True)
class QuadratureConfig:
    node_count: int = 32
    panel_count: int = 8
    rel_tolerance: float = 1e-10

    def __post_init__(self):
        if int(self.node_count) != self.node_count or self.node_count < 2:
            raise ValueError(f"node_count must be an integer >= 2, got {self.node_count}")
        if int(self.panel_count) != self.panel_count or self.panel_count < 1:
            raise ValueError(f"panel_count must be an integer >= 1, got {self.panel_count}")
        if not 0.0 < self.rel_tolerance < 1.0:
            raise ValueError(f"rel_tolerance must lie in (0, 1), got {self.rel_tolerance}")


DEFAULT_QUADRATURE = QuadratureConfig()


@lru_cache(maxsize=64)
def _legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _check_finite(alpha: float, psi: float) -> None:
    if not (math.isfinite(alpha) and math.isfinite(psi)):
        raise NonFiniteInput(f"alpha and psi must be finite, got alpha={alpha}, psi={psi}")


def _exponent(alpha: float, psi: float, u):
    return -(alpha + psi * u) * u


def _peak(alpha: float, psi: float, iv: Interval) -> tuple[float, float]:
    """Location and value of max(-alpha*u - psi*u**2) over iv."""
    candidates = [iv.lo, iv.hi]
    if psi != 0.0:
        stationary = -alpha / (2.0 * psi)
        if iv.lo < stationary < iv.hi:
            candidates.append(stationary)
    values = [_exponent(alpha, psi, u) for u in candidates]
    i = int(np.argmax(values))
    return candidates[i], values[i]


def exponent_shift(alpha: float, psi: float, iv: Interval) -> float:
    """Maximum of the exponent -alpha*u - psi*u**2 over ``iv``."""
    _check_finite(alpha, psi)
    return _peak(alpha, psi, iv)[1]


def _kept_pieces(alpha: float, psi: float, iv: Interval, u_peak: float) -> list[tuple[float, float]]:
    # Sub-intervals where the exponent is within LEVEL_DROP of its peak, as
    # offsets d = u - u_peak.  Relative to the peak the exponent is
    # -d*(slope + psi*d), so the cut points are roots of psi*d^2 + slope*d - L.
    slope = alpha + 2.0 * psi * u_peak
    lo, hi = iv.lo - u_peak, iv.hi - u_peak
    roots: list[float] = []
    if psi != 0.0:
        disc = slope * slope + 4.0 * psi * LEVEL_DROP
        if disc > 0.0 and math.isfinite(disc):
            q = -0.5 * (slope + math.copysign(math.sqrt(disc), slope))
            if q != 0.0:
                roots += [q / psi, -LEVEL_DROP / q]
    elif slope != 0.0:
        roots.append(LEVEL_DROP / slope)

    edges = [lo, *sorted(r for r in roots if lo < r < hi), hi]
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        if b > a and -mid * (slope + psi * mid) >= -LEVEL_DROP:
            pieces.append((a, b))
    return pieces or [(lo, hi)]


def _composite_rule(pieces, node_count: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _legendre_rule(node_count)
    nodes, weights = [], []
    for a, b in pieces:
        edges = np.linspace(a, b, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes.append((mid[:, None] + half[:, None] * x[None, :]).ravel())
        weights.append((half[:, None] * w[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _integrate_once(alpha, psi, local_pieces, u_peak, offset, node_count, panels, powers):
    # nodes are offsets d = u - u_peak so the exponent keeps full relative
    # precision when a narrow peak sits far from the origin
    d, w = _composite_rule(local_pieces, node_count, panels)
    u = u_peak + d
    delta = -d * (alpha + psi * (2.0 * u_peak + d))
    with np.errstate(over="ignore", invalid="ignore"):
        weighted = w * np.exp(delta + offset)
        pw = u[None, :] ** powers[:, None]
        values = pw @ weighted
        scales = np.abs(pw) @ weighted
    return values, scales


def shifted_power_integrals(
    alpha: float,
    psi: float,
    iv: Interval,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    shift: float | None = None,
    max_power: int = MAX_POWER,
) -> tuple[np.ndarray, float]:
    """Integrals of u**k * exp(-alpha*u - psi*u**2 - shift) for k = 0..max_power.

    Returns ``(values, shift)``.  When ``shift`` is None it is the maximum of
    the exponent over ``iv``; an explicit shift lets callers put several
    intervals on a common scale.
    """
    alpha, psi = float(alpha), float(psi)
    _check_finite(alpha, psi)
    u_peak, peak = _peak(alpha, psi, iv)
    if not math.isfinite(peak):
        raise IntegrandOverflow(f"exponent overflows for alpha={alpha}, psi={psi} on {iv}")
    if shift is None:
        shift = peak
    elif not math.isfinite(shift):
        raise NonFiniteInput(f"shift must be finite, got {shift}")
    offset = peak - shift

    pieces = _kept_pieces(alpha, psi, iv, u_peak)
    powers = np.arange(max_power + 1)
    panels = cfg.panel_count
    prev, _ = _integrate_once(alpha, psi, pieces, u_peak, offset, cfg.node_count, panels, powers)
    for _ in range(MAX_DOUBLINGS):
        panels *= 2
        cur, scale = _integrate_once(alpha, psi, pieces, u_peak, offset, cfg.node_count, panels, powers)
        if not (np.all(np.isfinite(cur)) and np.all(np.isfinite(scale))):
            raise IntegrandOverflow(f"non-finite integrand for alpha={alpha}, psi={psi} on {iv}")
        # odd powers can cancel to ~0, so compare against the integral of |u|^k
        if np.all(np.abs(cur - prev) <= cfg.rel_tolerance * scale):
            if offset == 0.0 and not cur[0] > 0.0:
                raise IntegrandOverflow(f"normalizer underflows for alpha={alpha}, psi={psi} on {iv}")
            return cur, float(shift)
        prev = cur
    raise ToleranceNotReached(
        f"no agreement to {cfg.rel_tolerance:g} after {panels} panels "
        f"(alpha={alpha}, psi={psi}, interval={iv})"
    )


def exp_poly_integral(
    k: int,
    alpha: float,
    psi: float,
    iv: Interval,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    shift: float | None = None,
) -> float:
    """Shifted integral of u**k * exp(-alpha*u - psi*u**2) over ``iv``.

    The integrand is multiplied by exp(-shift); by default the shift is
    :func:`exponent_shift` so the integrand never exceeds |u|**k.
    """
    if k not in range(MAX_POWER + 1):
        raise ValueError(f"k must be one of 0..{MAX_POWER}, got {k}")
    values, _ = shifted_power_integrals(alpha, psi, iv, cfg, shift=shift, max_power=k)
    return float(values[k])


def shifted_log_normalizer(
    alpha: float, psi: float, iv: Interval, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> tuple[float, float]:
    """log of the integral of exp(-alpha*u - psi*u**2) over iv, and the shift used."""
    values, shift = shifted_power_integrals(alpha, psi, iv, cfg, max_power=0)
    return shift + math.log(values[0]), shift
