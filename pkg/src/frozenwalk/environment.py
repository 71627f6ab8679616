"""Frozen environments: construction, prefix statistics, limit constants, diagnostics.

An environment is a finite prefix ``(omega_0, ..., omega_{K-1})`` of per-site
success probabilities in the open interval (0,1).  All built-in generators are
deterministic functions of ``(spec, length, seed)``; randomness comes from a
counter-based Philox generator keyed by ``(seed, stream id)`` so that
environment generation and walk sampling never share a stream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad

from .errors import BoundsError, GenerationError, NumericQualityError, UnsupportedModeError

# Stream ids for the counter-based generator.  Keeping them disjoint makes
# environment generation, walk sampling, and map sampling independently
# reproducible.
ENV_STREAM = 0
WALK_STREAM = 1
MAP_STREAM = 2

_MASK64 = (1 << 64) - 1


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Philox generator keyed by (seed, stream): splittable and reproducible."""
    key = (int(seed) & _MASK64) | ((int(stream) & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def _as_fraction(value) -> Fraction:
    # Fraction(float) is exact in binary; strings like "1/4" or "0.25" parse
    # to the intended decimal/ratio.
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


def _check_unit_open(value: float, what: str) -> None:
    if not (0.0 < float(value) < 1.0):
        raise GenerationError(f"{what} = {value!r} is not strictly inside (0,1)")


# ---------------------------------------------------------------------------
# Environment specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    """Every site carries the same probability p."""

    p: Union[float, Fraction, str]

    def __post_init__(self):
        object.__setattr__(self, "p", _as_fraction(self.p))
        _check_unit_open(float(self.p), "Constant.p")


@dataclass(frozen=True)
class TwoStateMarkov:
    """Stationary two-state Markov chain over ``values`` with symmetric stay probability."""

    values: tuple
    stay: Union[float, Fraction, str]

    def __post_init__(self):
        if len(self.values) != 2:
            raise GenerationError("TwoStateMarkov needs exactly two values")
        object.__setattr__(self, "values", tuple(_as_fraction(v) for v in self.values))
        object.__setattr__(self, "stay", _as_fraction(self.stay))
        for v in self.values:
            _check_unit_open(float(v), "TwoStateMarkov value")
        _check_unit_open(float(self.stay), "TwoStateMarkov.stay")


@dataclass(frozen=True)
class Sinusoid:
    """Deterministic environment ``omega_k = offset + amplitude * sin(k)`` (radians)."""

    offset: float
    amplitude: float
    # Entries are only checked at generation time: offset/amplitude may allow
    # excursions outside (0,1) on a grid that never hits them.


@dataclass(frozen=True)
class IidDiscrete:
    """I.i.d. draws from a finite distribution over ``values``."""

    values: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.values) != len(self.probs) or not self.values:
            raise GenerationError("IidDiscrete needs matching nonempty values/probs")
        object.__setattr__(self, "values", tuple(_as_fraction(v) for v in self.values))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        for v in self.values:
            _check_unit_open(float(v), "IidDiscrete value")
        total = float(sum(float(p) for p in self.probs))
        if abs(total - 1.0) > 1e-12 or any(float(p) < 0 for p in self.probs):
            raise GenerationError("IidDiscrete probabilities must be nonnegative and sum to 1")


@dataclass(frozen=True)
class TableFile:
    """Environment read from a plain-text file, one decimal omega per line."""

    path: str


EnvSpec = Union[Constant, TwoStateMarkov, Sinusoid, IidDiscrete, TableFile]

# The two environments exhibited in the verification figures.
FIGURE_MARKOV = TwoStateMarkov(values=(Fraction(1, 4), Fraction(3, 4)), stay=Fraction(4, 5))
FIGURE_SINUSOID = Sinusoid(offset=11 / 20, amplitude=9 / 20)


def spec_to_dict(spec: EnvSpec) -> dict:
    """JSON-serializable description of a spec (Fractions become 'num/den')."""
    def enc(v):
        if isinstance(v, Fraction):
            return f"{v.numerator}/{v.denominator}"
        return v

    if isinstance(spec, Constant):
        return {"variant": "constant", "p": enc(spec.p)}
    if isinstance(spec, TwoStateMarkov):
        return {"variant": "two_state_markov",
                "values": [enc(v) for v in spec.values], "stay": enc(spec.stay)}
    if isinstance(spec, Sinusoid):
        return {"variant": "sinusoid", "offset": spec.offset, "amplitude": spec.amplitude}
    if isinstance(spec, IidDiscrete):
        return {"variant": "iid_discrete",
                "values": [enc(v) for v in spec.values],
                "probs": [float(p) for p in spec.probs]}
    if isinstance(spec, TableFile):
        return {"variant": "table", "path": spec.path}
    raise UnsupportedModeError(f"unknown spec {spec!r}")


def spec_from_dict(d: dict) -> EnvSpec:
    """Inverse of :func:`spec_to_dict`."""
    variant = d.get("variant")
    if variant == "constant":
        return Constant(p=_as_fraction(d["p"]))
    if variant == "two_state_markov":
        return TwoStateMarkov(values=tuple(_as_fraction(v) for v in d["values"]),
                              stay=_as_fraction(d["stay"]))
    if variant == "sinusoid":
        return Sinusoid(offset=float(d["offset"]), amplitude=float(d["amplitude"]))
    if variant == "iid_discrete":
        return IidDiscrete(values=tuple(_as_fraction(v) for v in d["values"]),
                           probs=tuple(float(p) for p in d["probs"]))
    if variant == "table":
        return TableFile(path=str(d["path"]))
    raise UnsupportedModeError(f"unknown environment variant {variant!r}")


# ---------------------------------------------------------------------------
# Environment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Environment:
    """A frozen environment prefix.

    ``omega`` holds float64 entries; ``omega_exact`` holds the same entries as
    exact rationals when the generating spec supports them (None otherwise,
    e.g. for sinusoid environments whose entries are transcendental).
    """

    omega: np.ndarray
    spec: Optional[EnvSpec] = None
    seed: Optional[int] = None
    omega_exact: Optional[tuple] = None

    def __post_init__(self):
        arr = np.asarray(self.omega, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise GenerationError("environment must be a nonempty 1-d sequence")
        bad = np.nonzero(~((arr > 0.0) & (arr < 1.0)))[0]
        if bad.size:
            i = int(bad[0])
            raise GenerationError(f"omega[{i}] = {arr[i]!r} lies outside (0,1)")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "omega", arr)
        if self.omega_exact is not None:
            if len(self.omega_exact) != arr.size:
                raise GenerationError("omega_exact length mismatch")
            object.__setattr__(self, "omega_exact", tuple(self.omega_exact))

    @property
    def length(self) -> int:
        return int(self.omega.size)

    def require_length(self, needed: int, what: str = "operation") -> None:
        if self.length < needed:
            raise BoundsError(
                f"{what} needs environment length >= {needed}, have {self.length}")

    def exact_entry(self, k: int) -> Fraction:
        if self.omega_exact is None:
            raise UnsupportedModeError(
                "environment has no exact rational entries (float-only spec)")
        return self.omega_exact[k]

    @staticmethod
    def from_rationals(entries: Sequence[Fraction], spec: Optional[EnvSpec] = None,
                       seed: Optional[int] = None) -> "Environment":
        exact = tuple(_as_fraction(e) for e in entries)
        return Environment(omega=np.array([float(e) for e in exact]),
                           spec=spec, seed=seed, omega_exact=exact)


def generate(spec: EnvSpec, length: int, seed: int = 0) -> Environment:
    """Generate the length-K prefix of the environment described by ``spec``.

    Deterministic in ``(spec, length, seed)``.  Constant and Sinusoid specs
    ignore the seed; TwoStateMarkov starts from its stationary distribution
    (uniform, since the stay probability is symmetric).
    """
    if length < 1:
        raise GenerationError("length must be >= 1")

    if isinstance(spec, Constant):
        p = _as_fraction(spec.p)
        return Environment.from_rationals([p] * length, spec=spec, seed=seed)

    if isinstance(spec, Sinusoid):
        w = spec.offset + spec.amplitude * np.sin(np.arange(length, dtype=np.float64))
        bad = np.nonzero(~((w > 0.0) & (w < 1.0)))[0]
        if bad.size:
            i = int(bad[0])
            raise GenerationError(f"sinusoid entry omega[{i}] = {w[i]} outside (0,1)")
        return Environment(omega=w, spec=spec, seed=seed)

    if isinstance(spec, TwoStateMarkov):
        rng = stream_rng(seed, ENV_STREAM)
        stay = float(_as_fraction(spec.stay))
        start = int(rng.integers(2))  # stationary law is uniform (symmetric chain)
        flips = rng.random(length - 1) >= stay
        states = np.empty(length, dtype=np.int64)
        states[0] = start
        if length > 1:
            states[1:] = start ^ (np.cumsum(flips.astype(np.int64)) & 1)
        vals = [_as_fraction(v) for v in spec.values]
        exact = tuple(vals[s] for s in states)
        return Environment(omega=np.array([float(e) for e in exact]),
                           spec=spec, seed=seed, omega_exact=exact)

    if isinstance(spec, IidDiscrete):
        rng = stream_rng(seed, ENV_STREAM)
        idx = rng.choice(len(spec.values), size=length, p=[float(p) for p in spec.probs])
        vals = [_as_fraction(v) for v in spec.values]
        exact = tuple(vals[i] for i in idx)
        return Environment(omega=np.array([float(e) for e in exact]),
                           spec=spec, seed=seed, omega_exact=exact)

    if isinstance(spec, TableFile):
        entries = []
        with open(spec.path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                try:
                    value = Fraction(text)
                except (ValueError, ZeroDivisionError) as exc:
                    raise GenerationError(
                        f"{spec.path}:{lineno}: cannot parse {text!r} as a probability"
                    ) from exc
                if not (0 < value < 1):
                    raise GenerationError(
                        f"{spec.path}:{lineno}: value {text} outside (0,1)")
                entries.append(value)
        if len(entries) < length:
            raise BoundsError(
                f"table {spec.path} holds {len(entries)} entries, need {length}")
        return Environment.from_rationals(entries[:length], spec=spec, seed=seed)

    raise UnsupportedModeError(f"unknown spec {spec!r}")


# ---------------------------------------------------------------------------
# Prefix statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrefixStats:
    """Cumulative sojourn-time mean and variance prefixes.

    ``mu[k]`` is the sum of inverse entries over sites < k (expected hitting
    time of site k); ``sigma2[k]`` the matching variance sum.  Both arrays have
    length K+1 with index 0 equal to 0.
    """

    mu: np.ndarray
    sigma2: np.ndarray

    def __post_init__(self):
        for name in ("mu", "sigma2"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def prefix_stats(env: Environment) -> PrefixStats:
    """Cumulative sums of ``1/omega`` and ``(1-omega)/omega^2``.

    Accumulation runs in extended precision so that prefixes of up to ~1e7
    terms keep better than 1e-10 relative accuracy in the float64 result.
    """
    inv = 1.0 / env.omega.astype(np.longdouble)
    var = (1.0 - env.omega.astype(np.longdouble)) * inv * inv
    mu = np.concatenate(([0.0], np.cumsum(inv))).astype(np.float64)
    sigma2 = np.concatenate(([0.0], np.cumsum(var))).astype(np.float64)
    return PrefixStats(mu=mu, sigma2=sigma2)


# ---------------------------------------------------------------------------
# Limit constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitParams:
    """Limit constants (mu, sigma^2, lambda) of an environment, with sigma~^2 = sigma^2/mu^3."""

    mu: float
    sigma2: float
    lam: float = 0.0
    sigma_tilde2: float = field(init=False)

    def __post_init__(self):
        if not (self.mu > 1.0):
            raise GenerationError(f"mu = {self.mu} must exceed 1")
        if not (self.sigma2 > 0.0):
            raise GenerationError(f"sigma2 = {self.sigma2} must be positive")
        if not (0.0 <= self.lam < 0.5):
            raise GenerationError(f"lambda = {self.lam} must lie in [0, 1/2)")
        object.__setattr__(self, "sigma_tilde2", self.sigma2 / self.mu ** 3)


def limit_params(spec: EnvSpec) -> LimitParams:
    """Closed-form (or quadrature) limit constants for a built-in spec.

    For all built-in specs the inverse entries are bounded, so lambda = 0.
    Table specs carry no generating law: callers must supply LimitParams.
    """
    if isinstance(spec, Constant):
        p = float(_as_fraction(spec.p))
        return LimitParams(mu=1.0 / p, sigma2=(1.0 - p) / p ** 2)

    if isinstance(spec, TwoStateMarkov):
        # Symmetric stay probability: stationary law is uniform over the two values.
        a, b = (float(_as_fraction(v)) for v in spec.values)
        mu = 0.5 * (1.0 / a + 1.0 / b)
        sigma2 = 0.5 * ((1.0 - a) / a ** 2 + (1.0 - b) / b ** 2)
        return LimitParams(mu=mu, sigma2=sigma2)

    if isinstance(spec, IidDiscrete):
        vals = [float(_as_fraction(v)) for v in spec.values]
        probs = [float(p) for p in spec.probs]
        mu = sum(p / v for p, v in zip(probs, vals))
        sigma2 = sum(p * (1.0 - v) / v ** 2 for p, v in zip(probs, vals))
        return LimitParams(mu=mu, sigma2=sigma2)

    if isinstance(spec, Sinusoid):
        # sin k is equidistributed mod 2*pi, so averages become circle integrals.
        c, d = spec.offset, spec.amplitude
        def w(theta):
            return c + d * math.sin(theta)
        mu, _ = quad(lambda t: 1.0 / w(t), 0.0, 2.0 * math.pi,
                     limit=200, epsabs=1e-13, epsrel=1e-13)
        second, _ = quad(lambda t: 1.0 / w(t) ** 2, 0.0, 2.0 * math.pi,
                         limit=200, epsabs=1e-13, epsrel=1e-13)
        mu /= 2.0 * math.pi
        second /= 2.0 * math.pi
        return LimitParams(mu=mu, sigma2=second - mu)

    if isinstance(spec, TableFile):
        raise UnsupportedModeError(
            "table-backed specs carry no generating law; supply LimitParams explicitly")

    raise UnsupportedModeError(f"unknown spec {spec!r}")


# ---------------------------------------------------------------------------
# Regularity diagnostics
# ---------------------------------------------------------------------------

def b_scale(k: np.ndarray) -> np.ndarray:
    """Moving-average window scale (k log k)^(1/2)."""
    k = np.asarray(k, dtype=np.float64)
    return np.sqrt(k * np.log(np.maximum(k, 2.0)))


@dataclass(frozen=True)
class DiagnosticsReport:
    """Finite-sample residual trajectories for the environment regularity conditions.

    The heuristic flags mark a residual trajectory as "consistent" when it is
    non-increasing over the top half of the k grid.  This is a finite-sample
    trend label, not a verdict on the asymptotic condition.
    """

    spec: Optional[dict]
    params: dict
    k_grid: tuple
    u_values: tuple
    growth: np.ndarray          # omega_k^{-1} / k^lambda at grid points
    mean_residual: np.ndarray   # |mu_k/k - mu| * k^lambda * (log k)^(1/2)
    variance_residual: np.ndarray
    third_moment: np.ndarray    # running average of omega^{-3}
    moving_avg: np.ndarray      # shape (len(u_values), len(k_grid)); M_k(u)/k^(1/2-lambda)
    heuristic_flags: dict

    def to_json(self) -> str:
        payload = {
            "spec": self.spec,
            "params": self.params,
            "k_grid": list(self.k_grid),
            "u_values": list(self.u_values),
            "residuals": {
                "growth": self.growth.tolist(),
                "mean": self.mean_residual.tolist(),
                "variance": self.variance_residual.tolist(),
                "third_moment": self.third_moment.tolist(),
                "moving_avg": self.moving_avg.tolist(),
            },
            "heuristic_flags": self.heuristic_flags,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _trend_flag(values: np.ndarray) -> bool:
    # Non-increasing over the top half of the grid (heuristic trend label).
    half = len(values) // 2
    tail = values[half:]
    return bool(np.all(np.diff(tail) <= 1e-15))


def diagnostics(env: Environment, params: LimitParams,
                k_grid: Sequence[int], u_values: Sequence[float]) -> DiagnosticsReport:
    """Residual trajectories for the growth/mean/variance/moment/moving-average conditions."""
    k_grid = tuple(int(k) for k in k_grid)
    u_values = tuple(float(u) for u in u_values)
    if not k_grid or any(k < 2 for k in k_grid):
        raise BoundsError("k_grid must contain integers >= 2")
    kmax = max(k_grid)
    reach = int(kmax + max(u_values) * b_scale(np.array([kmax]))[0]) + 1
    if reach > env.length:
        raise BoundsError(
            f"diagnostics needs environment length >= {reach}, have {env.length}")

    inv = 1.0 / env.omega
    stats = prefix_stats(env)
    kk = np.array(k_grid, dtype=np.float64)
    klam = kk ** params.lam
    logk = np.sqrt(np.log(kk))

    growth = inv[np.array(k_grid)] / klam
    mean_res = np.abs(stats.mu[np.array(k_grid)] / kk - params.mu) * klam * logk
    var_res = np.abs(stats.sigma2[np.array(k_grid)] / kk - params.sigma2) * klam * logk
    third = np.concatenate(([0.0], np.cumsum(inv ** 3)))[np.array(k_grid)] / kk

    # Centered partial sums S(m) = mu_m - mu * m give the moving-average maxima.
    centered = stats.mu - params.mu * np.arange(stats.mu.size)
    moving = np.empty((len(u_values), len(k_grid)))
    for ui, u in enumerate(u_values):
        for ki, k in enumerate(k_grid):
            width = int(math.floor(u * b_scale(np.array([k]))[0]))
            lo = max(0, k - width)
            hi = min(centered.size - 1, k + width)
            window = np.abs(centered[lo:hi + 1] - centered[k])
            moving[ui, ki] = window.max() / (k ** (0.5 - params.lam))

    residuals = {
        "growth": growth, "mean": mean_res, "variance": var_res,
        "third_moment": third,
    }
    flags = {name: _trend_flag(vals) for name, vals in residuals.items()}
    flags["moving_avg"] = bool(all(_trend_flag(moving[ui]) for ui in range(len(u_values))))
    flags["note"] = "heuristic: non-increasing residual over the top half of the k grid"

    for arr in (growth, mean_res, var_res, third, moving):
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise NumericQualityError("diagnostic residuals must be finite and nonnegative")

    return DiagnosticsReport(
        spec=spec_to_dict(env.spec) if env.spec is not None else None,
        params={"mu": params.mu, "sigma2": params.sigma2, "lambda": params.lam,
                "sigma_tilde2": params.sigma_tilde2},
        k_grid=k_grid, u_values=u_values,
        growth=growth, mean_residual=mean_res, variance_residual=var_res,
        third_moment=third, moving_avg=moving, heuristic_flags=flags)



# ---------------------------------------------------------------------------
# Mixing coefficients for finite-state Markov environments
# ---------------------------------------------------------------------------

def phi_mixing_markov(transition, stationary, k: int):
    """Uniform mixing coefficient phi(k) of a finite-state stationary Markov chain.

    For a Markov chain the sup over past events collapses to conditioning on
    the pinned state, so phi(k) equals the worst-case total deviation
    ``max_i max_B |P^k(i, B) - pi(B)|``, computed from the k-step transition
    matrix.  The maximizing B collects the states where ``P^k(i, j) > pi(j)``.

    Entries may be floats or exact Fractions.  The exact route matters for
    large lags: phi(k) decays geometrically, so a float matrix power loses all
    relative accuracy once phi(k) approaches machine epsilon.
    """
    if k < 1:
        raise GenerationError("lag k must be >= 1")
    rows = [list(r) for r in transition]
    pi = list(stationary)
    m = len(rows)
    if any(len(r) != m for r in rows) or len(pi) != m:
        raise GenerationError("transition matrix must be square and match pi")
    exact = all(isinstance(x, (Fraction, int)) for r in rows for x in r) and \
        all(isinstance(x, (Fraction, int)) for x in pi)
    tol = 0 if exact else 1e-12
    if any(x < -tol for r in rows for x in r) or \
            any(abs(sum(r) - 1) > tol for r in rows):
        raise GenerationError("transition matrix must be row-stochastic")
    if any(x < -tol for x in pi) or abs(sum(pi) - 1) > tol:
        raise GenerationError("stationary vector must be a probability distribution")
    for j in range(m):
        if abs(sum(pi[i] * rows[i][j] for i in range(m)) - pi[j]) > tol:
            raise GenerationError("pi is not stationary for the given transition matrix")

    if exact:
        Pk = rows
        for _ in range(k - 1):
            Pk = [[sum(Pk[i][l] * rows[l][j] for l in range(m)) for j in range(m)]
                  for i in range(m)]
        return max(sum(max(Pk[i][j] - pi[j], 0) for j in range(m)) for i in range(m))
    Pk = np.linalg.matrix_power(np.asarray(rows, dtype=np.float64), k)
    deviation = Pk - np.asarray(pi, dtype=np.float64)[np.newaxis, :]
    return float(np.max(np.sum(np.maximum(deviation, 0.0), axis=1)))


def two_state_transition(stay, exact: bool = False):
    """Transition matrix and stationary law of the symmetric two-state chain."""
    if exact:
        s = _as_fraction(stay)
        return [[s, 1 - s], [1 - s, s]], [Fraction(1, 2), Fraction(1, 2)]
    stay = float(stay)
    P = np.array([[stay, 1.0 - stay], [1.0 - stay, stay]])
    return P, np.array([0.5, 0.5])
