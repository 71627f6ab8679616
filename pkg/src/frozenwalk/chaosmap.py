"""The continuum piecewise-affine dynamics in exact rational arithmetic.

Each cell [k, k+1) carries a two-branch expanding affine map: the lower part
[k, k+1-w) stretches onto [k, k+1), the upper part [k+1-w, k+1) onto
[k+1, k+2), where w is the cell's environment entry.  Slopes exceed 1, so
float orbits are meaningless after a few dozen steps; every operation here is
exact over rationals, and only the initial point of a sampled trajectory is
discretized (to a dyadic rational).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .environment import Environment, MAP_STREAM, stream_rng
from .errors import BoundsError, GenerationError, ResourceCapError, UnsupportedModeError

DEFAULT_PUSHFORWARD_CAP = 16

ZERO = Fraction(0)
ONE = Fraction(1)


def apply_map(x: Fraction, env: Environment) -> Fraction:
    """One exact application of the global map to the point x >= 0."""
    x = Fraction(x)
    if x < 0:
        raise GenerationError(f"point {x} must be nonnegative")
    k = int(x)  # floor for nonnegative rationals
    if k >= env.length:
        raise BoundsError(f"point in cell {k} but environment has {env.length} sites")
    w = env.exact_entry(k)
    u = x - k
    split = 1 - w
    if u < split:
        return k + u / split
    return k + 1 + (u - split) / w


@dataclass(frozen=True)
class IntervalMeasure:
    """A piecewise-constant density on [0, inf) with exact rational breakpoints.

    ``pieces`` are (lo, hi, density) triples, sorted and non-overlapping, with
    total mass exactly 1.
    """

    pieces: tuple

    def __post_init__(self):
        mass = ZERO
        prev_hi = None
        for lo, hi, dens in self.pieces:
            if not (ZERO <= lo < hi) or dens < 0:
                raise GenerationError("pieces must satisfy 0 <= lo < hi, density >= 0")
            if prev_hi is not None and lo < prev_hi:
                raise GenerationError("pieces must be sorted and non-overlapping")
            prev_hi = hi
            mass += dens * (hi - lo)
        if mass != 1:
            raise GenerationError(f"total mass {mass} != 1")

    def total_mass(self) -> Fraction:
        return sum((d * (hi - lo) for lo, hi, d in self.pieces), ZERO)

    def to_json_obj(self) -> list:
        def enc(q: Fraction) -> str:
            return f"{q.numerator}/{q.denominator}"
        return [{"lo": enc(lo), "hi": enc(hi), "density": enc(d)}
                for lo, hi, d in self.pieces]


def _normalize(raw: list) -> tuple:
    """Merge possibly-overlapping raw pieces into sorted disjoint pieces.

    Splits at every breakpoint and every integer, sums densities on the
    elementary intervals, then merges adjacent runs of equal density that do
    not cross an integer (cell boundaries stay explicit for cell_law).
    """
    delta: dict = {}
    for lo, hi, dens in raw:
        delta[lo] = delta.get(lo, ZERO) + dens
        delta[hi] = delta.get(hi, ZERO) - dens
    points = set(delta)
    if points:
        lo_all = min(points)
        hi_all = max(points)
        for m in range(int(lo_all), int(hi_all) + 2):
            q = Fraction(m)
            if lo_all <= q <= hi_all:
                points.add(q)
    cuts = sorted(points)
    pieces = []
    running = ZERO
    for a, b in zip(cuts[:-1], cuts[1:]):
        running += delta.get(a, ZERO)
        if running != 0:
            if (pieces and pieces[-1][1] == a and pieces[-1][2] == running
                    and a != Fraction(int(a))):
                lo_prev, _, dens = pieces.pop()
                pieces.append((lo_prev, b, dens))
            else:
                pieces.append((a, b, running))
    return tuple(pieces)


def pushforward(env: Environment, n: int,
                cap: int = DEFAULT_PUSHFORWARD_CAP) -> IntervalMeasure:
    """Exact image of Uniform[0,1) under n applications of the map.

    Worst-case piece count doubles per step (2^n pieces); ``cap`` refuses the
    blow-up up front.  Piece lists are re-normalized after every step, which
    keeps the count linear whenever within-cell densities stay constant.
    """
    if env.omega_exact is None:
        raise UnsupportedModeError("pushforward needs rational environment entries")
    if n > cap:
        raise ResourceCapError(
            f"pushforward over {n} steps refused: piece count grows like 2^n "
            f"(cap {cap}; pass a larger cap to override)")
    env.require_length(n + 1, "pushforward")
    pieces = [(ZERO, ONE, ONE)]
    for _ in range(n):
        image = []
        for lo, hi, dens in pieces:
            k = int(lo)
            w = env.omega_exact[k]
            split = k + 1 - w  # in-cell breakpoint
            if lo < split:
                a, b = lo, min(hi, split)
                # lower branch: slope 1/(1-w), image in [k, k+1)
                image.append((k + (a - k) / (1 - w), k + (b - k) / (1 - w),
                              dens * (1 - w)))
            if hi > split:
                a, b = max(lo, split), hi
                # upper branch: slope 1/w, image in [k+1, k+2)
                image.append((k + 1 + (a - split) / w, k + 1 + (b - split) / w,
                              dens * w))
        pieces = list(_normalize(image))
    return IntervalMeasure(pieces=tuple(pieces))


@dataclass(frozen=True)
class CellLaw:
    """Per-cell masses of an interval measure plus within-cell density profiles."""

    masses: dict          # cell -> Fraction mass
    uniform: dict         # cell -> bool (constant density over the whole cell)
    profiles: dict        # cell -> tuple of (lo, hi, density) pieces

    def mass_vector(self, n: int) -> list:
        return [self.masses.get(k, ZERO) for k in range(n + 1)]


def cell_law(m: IntervalMeasure) -> CellLaw:
    """Aggregate an interval measure by integer cell.

    A cell is flagged uniform when its (normalized) profile is a single piece
    spanning exactly [k, k+1): constant density over the full cell.
    """
    per_cell: dict = {}
    for lo, hi, dens in m.pieces:
        k = int(lo)
        if hi > k + 1:
            raise GenerationError("normalized pieces must not cross cell boundaries")
        per_cell.setdefault(k, []).append((lo, hi, dens))
    masses = {}
    uniform = {}
    profiles = {}
    for k, ps in sorted(per_cell.items()):
        masses[k] = sum((d * (hi - lo) for lo, hi, d in ps), ZERO)
        uniform[k] = (len(ps) == 1 and ps[0][0] == k and ps[0][1] == k + 1)
        profiles[k] = tuple(ps)
    return CellLaw(masses=masses, uniform=uniform, profiles=profiles)


def draw_dyadic_uniform(rng, precision_bits: int) -> Fraction:
    """Uniform dyadic rational j / 2^B with j uniform in 0 .. 2^B - 1."""
    if precision_bits < 1:
        raise GenerationError("precision_bits must be >= 1")
    j = 0
    remaining = precision_bits
    while remaining > 0:
        chunk = min(32, remaining)
        j = (j << chunk) | int(rng.integers(0, 1 << chunk))
        remaining -= chunk
    return Fraction(j, 1 << precision_bits)


def sample_trajectory(env: Environment, n: int, seed: int,
                      precision_bits: int = 40,
                      start: Optional[Fraction] = None) -> int:
    """Cell index after n exact map iterations from a random dyadic start.

    The start point is the only discretization; every iteration is exact, so
    for fixed precision the output law is the pushforward of the discretized
    uniform law.  ``start`` overrides the random draw (used by enumeration
    oracles).
    """
    if start is None:
        rng = stream_rng(seed, MAP_STREAM)
        x = draw_dyadic_uniform(rng, precision_bits)
    else:
        x = Fraction(start)
    for _ in range(n):
        x = apply_map(x, env)
    return int(x)
