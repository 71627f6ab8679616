"""The unidirectional walk: pmf propagation, Monte Carlo sampling, hitting times.

Two pmf engines exist side by side: a float64 engine (default, fast enough for
n = 2**13) and an exact engine over rationals (slow, intended as an oracle for
n up to a few hundred).  The exact engine never rounds, so its masses sum to 1
identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.signal import lfilter

from .environment import Environment, WALK_STREAM, prefix_stats, stream_rng
from .errors import BoundsError, UnsupportedModeError

# Masses below this threshold at the support edges are trimmed (and recorded)
# to keep the float engine out of denormal territory.
_TRIM = 1e-300


@dataclass(frozen=True)
class Pmf:
    """Probability mass function of the walk position at a fixed time.

    ``masses`` is either a float64 array (float engine) or a tuple of
    Fractions (exact engine), covering sites ``origin .. origin+len-1``.
    """

    origin: int
    masses: object
    time: int
    trimmed_mass: float = 0.0

    @property
    def exact(self) -> bool:
        return not isinstance(self.masses, np.ndarray)

    @property
    def support_max(self) -> int:
        return self.origin + len(self.masses) - 1

    def total_mass(self):
        if self.exact:
            return sum(self.masses, Fraction(0))
        return float(np.sum(self.masses))

    def mass_deviation(self) -> float:
        """|sum of stored masses + trimmed - 1|: a numeric-quality metric."""
        if self.exact:
            return float(abs(self.total_mass() - 1))
        return abs(self.total_mass() + self.trimmed_mass - 1.0)

    def prob(self, site: int):
        if self.origin <= site <= self.support_max:
            return self.masses[site - self.origin]
        return Fraction(0) if self.exact else 0.0

    def dense(self, length: Optional[int] = None) -> np.ndarray:
        """Float array over sites 0..length-1 (default: support_max+1)."""
        length = self.support_max + 1 if length is None else length
        out = np.zeros(length)
        vals = [float(m) for m in self.masses] if self.exact else self.masses
        out[self.origin:self.origin + len(vals)] = vals
        return out

    def to_csv(self) -> str:
        lines = ["site,mass"]
        for i, m in enumerate(self.masses):
            lines.append(f"{self.origin + i},{float(m)!r}")
        return "\n".join(lines) + "\n"


def delta0(exact: bool = False) -> Pmf:
    """Point mass at site 0 at time 0."""
    if exact:
        return Pmf(origin=0, masses=(Fraction(1),), time=0)
    return Pmf(origin=0, masses=np.array([1.0]), time=0)


def step_pmf(p: Pmf, env: Environment) -> Pmf:
    """One step of mass flow: p'(k) = (1-omega_k) p(k) + omega_{k-1} p(k-1)."""
    env.require_length(p.support_max + 1, "step_pmf")
    if p.exact:
        if env.omega_exact is None:
            raise UnsupportedModeError("exact stepping needs rational environment entries")
        w = env.omega_exact
        old = p.masses
        o = p.origin
        new = []
        for i in range(len(old) + 1):
            stay = (1 - w[o + i]) * old[i] if i < len(old) else Fraction(0)
            move = w[o + i - 1] * old[i - 1] if i > 0 else Fraction(0)
            new.append(stay + move)
        return Pmf(origin=o, masses=tuple(new), time=p.time + 1,
                   trimmed_mass=p.trimmed_mass)
    w = env.omega[p.origin:p.support_max + 1]
    old = p.masses
    new = np.empty(len(old) + 1)
    new[0] = (1.0 - w[0]) * old[0]
    new[1:-1] = (1.0 - w[1:]) * old[1:] + w[:-1] * old[:-1]
    new[-1] = w[-1] * old[-1]
    return _trim(Pmf(origin=p.origin, masses=new, time=p.time + 1,
                     trimmed_mass=p.trimmed_mass))


def _trim(p: Pmf) -> Pmf:
    m = p.masses
    lo, hi = 0, len(m)
    while lo < hi - 1 and m[lo] < _TRIM:
        lo += 1
    while hi - 1 > lo and m[hi - 1] < _TRIM:
        hi -= 1
    if lo == 0 and hi == len(m):
        return p
    trimmed = float(np.sum(m[:lo]) + np.sum(m[hi:]))
    return Pmf(origin=p.origin + lo, masses=m[lo:hi].copy(), time=p.time,
               trimmed_mass=p.trimmed_mass + trimmed)


def walk_pmf(env: Environment, n: int, engine: str = "float") -> Pmf:
    """Position distribution after n steps from site 0 (no renormalization).

    The float engine runs the O(n^2) propagation over a trimmed support
    window; the exact engine repeats the rational one-step law.
    """
    env.require_length(n + 1, "walk_pmf")
    if engine == "exact":
        p = delta0(exact=True)
        for _ in range(n):
            p = step_pmf(p, env)
        return p
    if engine != "float":
        raise UnsupportedModeError(f"unknown engine {engine!r}")

    w = env.omega
    p = np.zeros(n + 1)
    p[0] = 1.0
    lo, hi = 0, 0  # inclusive support window
    trimmed = 0.0
    for _ in range(n):
        hi = min(hi + 1, n)
        seg = p[lo:hi + 1]
        ww = w[lo:hi + 1]
        upd = (1.0 - ww) * seg
        upd[1:] += ww[:-1] * seg[:-1]
        p[lo:hi + 1] = upd
        while lo < hi and p[lo] < _TRIM:
            trimmed += p[lo]
            p[lo] = 0.0
            lo += 1
        while hi > lo and p[hi] < _TRIM:
            trimmed += p[hi]
            p[hi] = 0.0
            hi -= 1
    return Pmf(origin=lo, masses=p[lo:hi + 1].copy(), time=n, trimmed_mass=trimmed)


# ---------------------------------------------------------------------------
# Monte Carlo sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathSample:
    """One sampled walk: final position, optional full trajectory, stream metadata."""

    final: int
    trajectory: Optional[np.ndarray]
    seed: int
    stream: int


def sample_positions(env: Environment, n: int, seed: int, count: int) -> np.ndarray:
    """Final positions of ``count`` independent walks at time n.

    Uses geometric sojourn sampling: one geometric draw per visited site
    instead of n Bernoulli draws, so the cost is O(n/mu) draws per sample.
    """
    env.require_length(n + 1, "sample_positions")
    rng = stream_rng(seed, WALK_STREAM)
    total = np.zeros(count)
    pos = np.zeros(count, dtype=np.int64)
    k0 = 0
    block = 512
    while k0 <= n and np.min(total) <= n:
        blk = min(block, env.length - k0)
        if blk <= 0:
            break
        taus = rng.geometric(p=env.omega[k0:k0 + blk], size=(count, blk))
        cums = total[:, np.newaxis] + np.cumsum(taus, axis=1)
        # Samples already past time n contribute nothing: their sums exceed n.
        pos += np.sum(cums <= n, axis=1)
        total = cums[:, -1]
        k0 += blk
    return pos


def sample_trajectories(env: Environment, n: int, seed: int, count: int) -> np.ndarray:
    """Full trajectories, shape (count, n+1): X_0 = 0, increments in {0,1}."""
    env.require_length(n + 1, "sample_trajectories")
    rng = stream_rng(seed, WALK_STREAM)
    traj = np.zeros((count, n + 1), dtype=np.int64)
    pos = np.zeros(count, dtype=np.int64)
    for t in range(n):
        u = rng.random(count)
        pos = pos + (u < env.omega[pos])
        traj[:, t + 1] = pos
    return traj


def sample_final(env: Environment, n: int, seed: int, count: int,
                 keep_trajectory: bool = False) -> list[PathSample]:
    """``count`` independent PathSamples of the walk at time n."""
    if keep_trajectory:
        traj = sample_trajectories(env, n, seed, count)
        return [PathSample(final=int(row[-1]), trajectory=row.copy(),
                           seed=seed, stream=WALK_STREAM)
                for row in traj]
    pos = sample_positions(env, n, seed, count)
    return [PathSample(final=int(x), trajectory=None, seed=seed, stream=WALK_STREAM)
            for x in pos]


# ---------------------------------------------------------------------------
# Hitting times
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HittingDist:
    """Truncated distribution of the hitting time T_k, with explicit tail mass.

    ``probs[i]`` is P(T_k = k + i) for i = 0..n_max-k; ``tail`` the mass
    beyond n_max (never silently dropped).
    """

    site: int
    n_max: int
    probs: object
    tail: object

    @property
    def exact(self) -> bool:
        return not isinstance(self.probs, np.ndarray)

    def prob(self, n: int):
        if self.site <= n <= self.n_max:
            return self.probs[n - self.site]
        return Fraction(0) if self.exact else 0.0

    def dense(self) -> np.ndarray:
        """Float array over n = 0..n_max."""
        out = np.zeros(self.n_max + 1)
        vals = [float(m) for m in self.probs] if self.exact else self.probs
        out[self.site:self.site + len(vals)] = vals
        return out


def default_n_max(env: Environment, k: int) -> int:
    """Truncation horizon mu_k + 12 sigma_k: tail below ~1e-30 for Gaussian-like laws."""
    stats = prefix_stats(env)
    return int(np.ceil(stats.mu[k] + 12.0 * np.sqrt(stats.sigma2[k])))


def _hitting_float(env: Environment, k: int, n_max: int,
                   snapshots: Optional[Iterable[int]] = None):
    """Forward convolution of geometric sojourns, float engine.

    Returns {j: array over n=0..n_max of P(T_j = n)} for each requested
    snapshot j (always includes k).  Each site costs one O(n_max) linear
    recurrence g(n) = (1-w) g(n-1) + w f(n-1).
    """
    want = set(snapshots) if snapshots is not None else set()
    want.add(k)
    f = np.zeros(n_max + 1)
    f[0] = 1.0  # T_0 = 0
    out = {}
    if 0 in want:
        out[0] = f.copy()
    for j in range(k):
        w = float(env.omega[j])
        shifted = np.concatenate(([0.0], f[:-1]))
        f = lfilter([w], [1.0, -(1.0 - w)], shifted)
        if j + 1 in want:
            out[j + 1] = f.copy()
    return out


def _hitting_exact(env: Environment, k: int, n_max: int,
                   snapshots: Optional[Iterable[int]] = None):
    """Exact-rational analogue of :func:`_hitting_float`."""
    if env.omega_exact is None:
        raise UnsupportedModeError("exact hitting distribution needs rational entries")
    want = set(snapshots) if snapshots is not None else set()
    want.add(k)
    f = [Fraction(0)] * (n_max + 1)
    f[0] = Fraction(1)
    out = {}
    if 0 in want:
        out[0] = list(f)
    for j in range(k):
        w = env.omega_exact[j]
        q = 1 - w
        g = [Fraction(0)] * (n_max + 1)
        for n in range(1, n_max + 1):
            g[n] = q * g[n - 1] + w * f[n - 1]
        f = g
        if j + 1 in want:
            out[j + 1] = list(f)
    return out


def hitting_dist(env: Environment, k: int, n_max: Optional[int] = None,
                 engine: str = "float") -> HittingDist:
    """Distribution of T_k (sum of k independent geometric sojourns), truncated."""
    if k < 1:
        raise BoundsError("hitting site k must be >= 1")
    env.require_length(k, "hitting_dist")
    if n_max is None:
        n_max = default_n_max(env, k)
    if n_max < k:
        raise BoundsError(f"n_max = {n_max} must be >= k = {k}")
    if engine == "exact":
        f = _hitting_exact(env, k, n_max)[k]
        probs = tuple(f[k:])
        tail = 1 - sum(f, Fraction(0))
        return HittingDist(site=k, n_max=n_max, probs=probs, tail=tail)
    if engine != "float":
        raise UnsupportedModeError(f"unknown engine {engine!r}")
    f = _hitting_float(env, k, n_max)[k]
    tail = max(0.0, 1.0 - float(np.sum(f)))
    return HittingDist(site=k, n_max=n_max, probs=f[k:].copy(), tail=tail)


def hitting_moments(env: Environment, k: int) -> tuple[float, float]:
    """(mean, variance) of T_k; exposed here because hitting semantics live in this module."""
    if k > env.length:
        raise BoundsError(f"k = {k} exceeds environment length {env.length}")
    stats = prefix_stats(env)
    return float(stats.mu[k]), float(stats.sigma2[k])
