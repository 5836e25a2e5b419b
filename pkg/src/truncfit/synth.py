"""Seeded synthetic data and brute-force reference estimators.

Random numbers come from splitmix64 in counter form: draw i of seed s is
mix(s + (i + 1) * 0x9E3779B97F4A7C15) mod 2**64, with the top 53 bits giving a
double in [0, 1).  It is simple enough to re-implement anywhere and gives
bit-identical streams.

The grid-search oracle deliberately shares no code with the estimator or the
quadrature module: it evaluates the log-likelihood over a grid with its own
fixed Gauss-Legendre rule and a log-sum-exp normalizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.special import logsumexp

from .model import TruncatedModel
from .quadrature import Interval, exponent_shift

__all__ = [
    "SamplerConfig",
    "splitmix64",
    "uniforms",
    "cdf_table",
    "sample",
    "grid_mle_oracle",
    "truncated_exponential_cdf",
    "truncated_exponential_mean",
]

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    method: Literal["inverse_cdf_table", "rejection"] = "inverse_cdf_table"
    table_resolution: int = 4096

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.method not in ("inverse_cdf_table", "rejection"):
            raise ValueError(f"unknown sampling method {self.method!r}")
        if self.method == "inverse_cdf_table" and self.table_resolution < 256:
            raise ValueError("table_resolution must be >= 256 for the table sampler")


def splitmix64(seed: int, n: int, start: int = 0) -> np.ndarray:
    """Outputs start..start+n-1 of the splitmix64 stream for ``seed``."""
    counter = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    z = np.uint64(seed) + counter * _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, n: int, start: int = 0) -> np.ndarray:
    return (splitmix64(seed, n, start) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def cdf_table(m: TruncatedModel, resolution: int = 4096, nodes_per_bin: int = 8):
    """Knots and CDF values on a uniform grid over the support."""
    iv = m.support
    knots = np.linspace(iv.lo, iv.hi, resolution + 1)
    x, w = np.polynomial.legendre.leggauss(nodes_per_bin)
    half = 0.5 * np.diff(knots)
    mid = 0.5 * (knots[:-1] + knots[1:])
    u = mid[:, None] + half[:, None] * x[None, :]
    shift = exponent_shift(m.alpha, m.psi, iv)
    mass = (half[:, None] * w[None, :] * np.exp(-(m.alpha + m.psi * u) * u - shift)).sum(axis=1)
    cdf = np.concatenate([[0.0], np.cumsum(mass)])
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    return knots, cdf


def _sample_table(m: TruncatedModel, n: int, cfg: SamplerConfig) -> np.ndarray:
    knots, cdf = cdf_table(m, cfg.table_resolution)
    u = uniforms(cfg.seed, n)
    j = np.clip(np.searchsorted(cdf, u, side="right") - 1, 0, len(cdf) - 2)
    width = cdf[j + 1] - cdf[j]
    frac = np.divide(u - cdf[j], width, out=np.zeros_like(u), where=width > 0)
    y = knots[j] + np.clip(frac, 0.0, 1.0) * (knots[j + 1] - knots[j])
    return np.clip(y, m.support.lo, m.support.hi)


def _sample_rejection(m: TruncatedModel, n: int, cfg: SamplerConfig) -> np.ndarray:
    iv = m.support
    shift = exponent_shift(m.alpha, m.psi, iv)
    out = np.empty(n)
    filled, cursor = 0, 0
    batch = max(1024, 2 * n)
    while filled < n:
        r = uniforms(cfg.seed, 2 * batch, cursor)
        cursor += 2 * batch
        y = iv.lo + r[0::2] * iv.width
        accept = r[1::2] < np.exp(-(m.alpha + m.psi * y) * y - shift)
        kept = y[accept][: n - filled]
        out[filled:filled + kept.size] = kept
        filled += kept.size
    return out


def sample(m: TruncatedModel, n: int, cfg: SamplerConfig = SamplerConfig()) -> np.ndarray:
    """n draws from ``m``; deterministic given (seed, method, resolution)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if cfg.method == "inverse_cdf_table":
        y = _sample_table(m, n, cfg)
    else:
        y = _sample_rejection(m, n, cfg)
    assert np.all((y >= m.support.lo) & (y <= m.support.hi))
    return y


# --- reference quantities used by the test-suite -------------------------------


def truncated_exponential_cdf(y, alpha: float, lo: float, hi: float):
    y = np.asarray(y, dtype=float)
    return -np.expm1(-alpha * (y - lo)) / -np.expm1(-alpha * (hi - lo))


def truncated_exponential_mean(alpha: float, lo: float, hi: float) -> float:
    """Mean of exp(-alpha*y) on [lo, hi], alpha != 0."""
    b = alpha * (hi - lo)
    # mean - lo = 1/alpha - (hi - lo) / (e^b - 1)
    return lo + 1.0 / alpha - (hi - lo) / math.expm1(b)


def _grid_log_normalizer(alphas, psis, iv: Interval, panels=64, nodes=16):
    """log Z on a (len(alphas), len(psis)) grid via a fixed rule and logsumexp."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(iv.lo, iv.hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    logw = np.log((half[:, None] * w[None, :]).ravel())
    out = np.empty((len(alphas), len(psis)))
    for i, a in enumerate(alphas):
        expo = -a * u[None, :] - psis[:, None] * (u * u)[None, :]
        out[i] = logsumexp(expo + logw[None, :], axis=1)
    return out


def grid_mle_oracle(
    sample: Sequence[float],
    support: Interval,
    alpha_range: Interval,
    psi_range: Interval,
    grid_size: int = 101,
) -> tuple[float, float, float]:
    """Maximize the log-likelihood by exhaustive grid search.

    The first grid spans the given ranges; it is followed by two zooms, each a
    grid of the same size over one tenth of the previous span, centred on the
    best point so far.  Returns the best (alpha, psi, loglik) ever evaluated.
    """
    if grid_size < 11:
        raise ValueError(f"grid_size must be >= 11, got {grid_size}")
    y = np.asarray(sample, dtype=float)
    n, sy, sy2 = y.size, float(y.sum()), float((y * y).sum())

    best = (math.nan, math.nan, -math.inf)
    a_lo, a_hi = alpha_range.lo, alpha_range.hi
    p_lo, p_hi = psi_range.lo, psi_range.hi
    for _ in range(3):
        alphas = np.linspace(a_lo, a_hi, grid_size)
        psis = np.linspace(p_lo, p_hi, grid_size)
        log_z = _grid_log_normalizer(alphas, psis, support)
        loglik = -alphas[:, None] * sy - psis[None, :] * sy2 - n * log_z
        i, j = np.unravel_index(np.argmax(loglik), loglik.shape)
        if loglik[i, j] > best[2]:
            best = (float(alphas[i]), float(psis[j]), float(loglik[i, j]))
        a_half = (a_hi - a_lo) / 20.0
        p_half = (p_hi - p_lo) / 20.0
        a_lo, a_hi = best[0] - a_half, best[0] + a_half
        p_lo, p_hi = best[1] - p_half, best[1] + p_half
    return best
