"""Centering factors, generalized inverses, Gaussian densities, LLT predictions.

Densities are evaluated in log space and exponentiated, so far-tail values
underflow to 0 instead of overflowing or producing NaN; sup-norm scans over
the full support rely on this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import ndtr

from .environment import Environment, LimitParams, PrefixStats, prefix_stats
from .errors import BoundsError, GenerationError

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class IncreasingSeq:
    """A strictly increasing sequence with a(0) = 0 (time units)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.size < 1 or arr[0] != 0.0:
            raise GenerationError("sequence must start at a(0) = 0")
        if np.any(np.diff(arr) <= 0):
            raise GenerationError("sequence must be strictly increasing")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def min_step(self) -> float:
        return float(np.min(np.diff(self.values))) if self.values.size > 1 else math.inf


def gen_inverse(a: Union[IncreasingSeq, np.ndarray], n) -> int:
    """Minimal index k with a(k) >= n (binary search); gen_inverse(a, 0) = 0."""
    values = a.values if isinstance(a, IncreasingSeq) else np.asarray(a)
    if n > values[-1]:
        raise BoundsError(
            f"sequence reaches only {values[-1]}, cannot invert level {n}")
    return int(np.searchsorted(values, n, side="left"))


def centering(env: Environment, n: int) -> int:
    """The walk's centering factor: minimal k with mu_k >= n."""
    stats = prefix_stats(env)
    return gen_inverse(stats.mu, n)


def f_density(stats: PrefixStats, k: int, n) -> float:
    """Gaussian density in the time variable with the hitting-time moments of site k."""
    if k < 1:
        raise GenerationError("f_density needs k >= 1 (sigma2_k > 0)")
    mu_k = stats.mu[k]
    s2 = stats.sigma2[k]
    log_val = -0.5 * (_LOG_2PI + math.log(s2)) - (n - mu_k) ** 2 / (2.0 * s2)
    return math.exp(log_val)


def f_density_array(stats: PrefixStats, k: int, n: np.ndarray) -> np.ndarray:
    """Vectorized :func:`f_density` over times n."""
    if k < 1:
        raise GenerationError("f_density needs k >= 1 (sigma2_k > 0)")
    mu_k = stats.mu[k]
    s2 = stats.sigma2[k]
    n = np.asarray(n, dtype=np.float64)
    return np.exp(-0.5 * (_LOG_2PI + math.log(s2)) - (n - mu_k) ** 2 / (2.0 * s2))


def g_density(params: LimitParams, mu_k: float, n: int) -> float:
    """Gaussian density in the time variable with variance n sigma^2 / mu."""
    if n < 1:
        raise GenerationError("g_density needs n >= 1")
    v = n * params.sigma2 / params.mu
    log_val = -0.5 * (_LOG_2PI + math.log(v)) - (mu_k - n) ** 2 / (2.0 * v)
    return math.exp(log_val)


def h_density(params: LimitParams, k_n: int, n: int, k) -> Union[float, np.ndarray]:
    """Gaussian density in the space variable: width sigma~ sqrt(n), centered at k_n."""
    if n < 1:
        raise GenerationError("h_density needs n >= 1")
    v = n * params.sigma_tilde2
    k = np.asarray(k, dtype=np.float64)
    out = np.exp(-0.5 * (_LOG_2PI + math.log(v)) - (k - k_n) ** 2 / (2.0 * v))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LltPrediction:
    """Predicted per-site masses (omega_k^{-1}/mu) h_n(k) for k = 0..n."""

    n: int
    k_n: int
    q: np.ndarray           # predicted mass per site
    gaussian: np.ndarray    # unmodulated h_n(k)
    modulation: np.ndarray  # omega_k^{-1}/mu
    params: LimitParams

    def to_csv(self) -> str:
        lines = ["site,predicted_mass,gaussian,modulation"]
        for k in range(self.n + 1):
            lines.append(f"{k},{float(self.q[k])!r},{float(self.gaussian[k])!r},"
                         f"{float(self.modulation[k])!r}")
        return "\n".join(lines) + "\n"


def llt_prediction(env: Environment, params: LimitParams, n: int) -> LltPrediction:
    """Modulated-Gaussian prediction of the walk's pmf at time n."""
    env.require_length(n + 1, "llt_prediction")
    k_n = centering(env, n)
    sites = np.arange(n + 1)
    gaussian = h_density(params, k_n, n, sites)
    modulation = (1.0 / env.omega[:n + 1]) / params.mu
    q = modulation * gaussian
    return LltPrediction(n=n, k_n=k_n, q=q, gaussian=gaussian,
                         modulation=modulation, params=params)


def clt_normal_cdf(x) -> Union[float, np.ndarray]:
    """Standard normal CDF (erf-based; max error well below 1e-10)."""
    out = ndtr(np.asarray(x, dtype=np.float64))
    return float(out) if out.ndim == 0 else out
