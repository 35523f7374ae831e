"""The three-tank switched server: exact event-driven flow and its Poincare map.

Fluid enters every tank at rate 1/3 and the server drains the tank it sits at at
rate 1, so the served tank falls at net rate 2/3 while the other two rise at 1/3.
When the served tank empties, the server moves to the other tank with the larger
scaled volume. Only the ratios d1, d2, d3 of the scaling constants matter.

States are exact rationals throughout. Irrational parameters (d's computed from
digit-stream breakpoints) enter only through the switching comparisons, which are
decided on rational enclosures of the d's; an undecidable comparison raises
:class:`~pwaffine.errors.PrecisionExhausted` instead of guessing.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .contraction import build_map
from .errors import BreakpointAnomaly, PrecisionExhausted
from .exactnum import DigitStream, compare, enclosure

# decimal digits carried for d's derived from digit streams
DEFAULT_PRECISION = int(os.environ.get("PWAFFINE_PRECISION", "36"))

THIRD = Fraction(1, 3)


@dataclass(frozen=True)
class SimplexState:
    v1: Fraction
    v2: Fraction
    v3: Fraction

    def __post_init__(self):
        for name in ("v1", "v2", "v3"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if min(self.v) < 0 or sum(self.v) != 1:
            raise ValueError(f"{self.v} is not in the simplex")

    @property
    def v(self) -> tuple:
        return (self.v1, self.v2, self.v3)

    def __getitem__(self, tank: int) -> Fraction:
        return self.v[tank - 1]

    @property
    def on_boundary(self) -> bool:
        return 0 in self.v

    def emptied(self) -> int:
        """Lowest-indexed empty tank."""
        for i, x in enumerate(self.v, 1):
            if x == 0:
                return i
        raise ValueError(f"{self} is an interior state")

    def distance(self, other) -> Fraction:
        return max(abs(a - b) for a, b in zip(self.v, other.v))

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.v) + ")"


def state(*v) -> SimplexState:
    if len(v) == 1:
        v = tuple(v[0])
    return SimplexState(*(Fraction(x) if not isinstance(x, str) else Fraction(x.strip()) for x in v))


@dataclass(frozen=True)
class DTriple:
    """Ratios (d1, d2, d3), each known to lie in ``[lower[i], upper[i]]``.

    Exact triples have ``lower == upper``. ``source_x`` keeps the breakpoints a
    triple was computed from, so the inverse conversion can return them unchanged.
    """

    lower: tuple
    upper: tuple
    source_x: tuple | None = None

    def __post_init__(self):
        if any(x <= 0 for x in self.lower):
            raise ValueError("d's must be strictly positive")
        if any(a > b for a, b in zip(self.lower, self.upper)):
            raise ValueError("lower bound above upper bound")

    @classmethod
    def exact(cls, d1, d2, d3) -> "DTriple":
        d = (Fraction(d1), Fraction(d2), Fraction(d3))
        return cls(d, d)

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper

    @property
    def values(self) -> tuple:
        """Midpoints (the exact values for exact triples)."""
        return tuple((a + b) / 2 for a, b in zip(self.lower, self.upper))

    @property
    def width(self) -> Fraction:
        return max(b - a for a, b in zip(self.lower, self.upper))


def _d1(x):
    return 1 / (3 * x) - 1


def _d2(x):
    return (2 - 3 * x) / (3 * x - 1)


def _d3(x):
    return (3 - 3 * x) / (3 * x - 2)


_D_FORMULAS = (_d1, _d2, _d3)
_X_RANGES = ((0, THIRD), (THIRD, 2 * THIRD), (2 * THIRD, 1))


def _stream_digits(base, precision):
    # d2 amplifies breakpoint errors by up to ~40 on the worked instances
    return math.ceil((precision + 4) / math.log10(base))


def d_from_x(x1, x2, x3, precision: int = DEFAULT_PRECISION) -> DTriple:
    """d_1 = 1/(3x_1) - 1, d_2 = (2 - 3x_2)/(3x_2 - 1), d_3 = (3 - 3x_3)/(3x_3 - 2).

    Rational inputs give an exact triple. Digit-stream inputs give enclosures of
    width about ``10**-precision``; every formula is decreasing in its argument.
    """
    xs = tuple(x if isinstance(x, DigitStream) else Fraction(x) for x in (x1, x2, x3))
    for i, (x, (lo, hi)) in enumerate(zip(xs, _X_RANGES), 1):
        if compare(x, lo) <= 0 or compare(x, hi) >= 0:
            raise ValueError(f"x{i} must lie in ({lo}, {hi})")
    lower, upper = [], []
    for x, g in zip(xs, _D_FORMULAS):
        if isinstance(x, DigitStream):
            lo, hi = enclosure(x, _stream_digits(x.base, precision))
            lower.append(g(hi))
            upper.append(g(lo))
        else:
            lower.append(g(x))
            upper.append(g(x))
    return DTriple(tuple(lower), tuple(upper), xs)


def _x_of_d(i, d):
    return 1 / (3 * (1 + d)) + Fraction(i - 1, 3)


def breakpoints_from_d(d: DTriple):
    """x_i = 1/(3(1 + d_i)) + (i - 1)/3, the inverse of :func:`d_from_x`.

    Exact triples are converted by the formula. Enclosed triples return the
    breakpoints they were computed from when ``d`` remembers them, and ``(lo, hi)``
    enclosures otherwise.
    """
    if d.is_exact:
        return tuple(_x_of_d(i, v) for i, v in enumerate(d.lower, 1))
    if d.source_x is not None:
        return d.source_x
    return tuple(
        (_x_of_d(i, hi), _x_of_d(i, lo)) for i, (lo, hi) in enumerate(zip(d.lower, d.upper), 1)
    )


# emptied tank -> (ratio index, scaled tank, other tank)
# the server moves to the scaled tank when d * v[scaled] > v[other]
_RULES = {1: (0, 3, 2), 2: (1, 1, 3), 3: (2, 2, 1)}

TIE_RULES = ("lower", "conjugate")


def switch_target(state: SimplexState, emptied: int, d: DTriple, tie: str = "lower") -> int:
    """Tank served after ``emptied`` runs dry.

    Ties go to the lower tank index (``tie="lower"``), or to the choice that keeps
    the Poincare map conjugate to the half-open interval map (``tie="conjugate"``).
    """
    if state[emptied] != 0:
        raise ValueError(f"tank {emptied} is not empty in {state}")
    if tie not in TIE_RULES:
        raise ValueError(f"tie must be one of {TIE_RULES}")
    k, scaled, other = _RULES[emptied]
    a, b = state[scaled], state[other]
    lo_gap = d.lower[k] * a - b
    hi_gap = d.upper[k] * a - b
    if lo_gap > 0:
        return scaled
    if hi_gap < 0:
        return other
    if lo_gap == hi_gap == 0:
        return min(scaled, other) if tie == "lower" else scaled
    raise PrecisionExhausted(
        f"switch after emptying tank {emptied} at {state} is within the d{k + 1} error band"
    )


def drain_step(state: SimplexState, served: int) -> tuple[SimplexState, Fraction]:
    """Serve ``served`` until it empties: duration 3/2 * v, others gain v/2 each."""
    v = state[served]
    if v == 0:
        raise ValueError(f"tank {served} is already empty")
    new = [x + v / 2 for x in state.v]
    new[served - 1] = Fraction(0)
    return SimplexState(*new), Fraction(3, 2) * v


def poincare(state: SimplexState, d: DTriple, tie: str = "lower") -> SimplexState:
    """First return of the flow to the boundary of the simplex."""
    emptied = state.emptied()
    return drain_step(state, switch_target(state, emptied, d, tie))[0]


@dataclass
class Segment:
    start: SimplexState
    served: int
    duration: Fraction
    end: SimplexState
    t0: Fraction


@dataclass
class Trajectory:
    segments: list
    samples_per_segment: int = 1

    @property
    def poincare_states(self) -> list:
        return [s.end for s in self.segments]

    @property
    def event_times(self) -> list:
        return [s.t0 + s.duration for s in self.segments]

    def samples(self):
        """Rows ``(t, v1, v2, v3, served)`` linearly interpolated along each segment."""
        rows = []
        n = self.samples_per_segment
        for seg in self.segments:
            for j in range(n):
                w = Fraction(j, n)
                v = [a + (b - a) * w for a, b in zip(seg.start.v, seg.end.v)]
                rows.append((seg.t0 + seg.duration * w, *v, seg.served))
        if self.segments:
            last = self.segments[-1]
            rows.append((last.t0 + last.duration, *last.end.v, last.served))
        return rows


def trajectory(
    v0: SimplexState,
    d: DTriple,
    n_events: int,
    samples_per_segment: int = 1,
    served: int | None = None,
    tie: str = "lower",
) -> Trajectory:
    """Run ``n_events`` switching events from ``v0``.

    Interior starts need the initially served tank; the flow then runs to the first
    boundary hit, which counts as the first event.
    """
    segments = []
    t = Fraction(0)
    cur = v0
    if not cur.on_boundary:
        if served is None:
            raise ValueError("interior initial state needs the initially served tank")
        nxt, dt = drain_step(cur, served)
        segments.append(Segment(cur, served, dt, nxt, t))
        t += dt
        cur = nxt
    while len(segments) < n_events:
        target = switch_target(cur, cur.emptied(), d, tie)
        nxt, dt = drain_step(cur, target)
        segments.append(Segment(cur, target, dt, nxt, t))
        t += dt
        cur = nxt
    return Trajectory(segments, samples_per_segment)


def phi(t) -> SimplexState:
    """Anticlockwise arc-length parametrisation of the boundary: 0 -> e2, 1/3 -> e3, 2/3 -> e1."""
    t = Fraction(t)
    if not 0 <= t < 1:
        raise ValueError(f"{t} is outside [0, 1)")
    if t < THIRD:
        return SimplexState(0, 1 - 3 * t, 3 * t)
    if t < 2 * THIRD:
        return SimplexState(3 * t - 1, 0, 2 - 3 * t)
    return SimplexState(3 - 3 * t, 3 * t - 2, 0)


def phi_inv(s: SimplexState) -> Fraction:
    if s.v1 == 0 and s.v3 < 1:
        return s.v3 / 3
    if s.v2 == 0 and s.v1 < 1:
        return (1 + s.v1) / 3
    if s.v3 == 0:
        return (3 - s.v1) / 3
    raise ValueError(f"{s} is not on the boundary")


def interval_map(d: DTriple):
    """The conjugate -1/2-affine interval map with alphas (1, 2, 1, 2)."""
    xs = breakpoints_from_d(d)
    if isinstance(xs[0], tuple):
        raise ValueError("d is only known as an enclosure; breakpoints are not exact")
    return build_map(2, -1, (0, *xs, 1), (1, 2, 1, 2))


def interval_poincare(t, d: DTriple, tie: str = "lower") -> Fraction:
    """``phi^-1(F(phi(t)))``."""
    return phi_inv(poincare(phi(t), d, tie))


def conjugacy_residual(d: DTriple, samples, tie: str = "conjugate") -> Fraction:
    """Largest ``|phi^-1(F(phi(t))) - f(t)|`` over the sample points.

    The default tie rule is the one induced by f's half-open pieces, under which the
    residual vanishes everywhere. With ``tie="lower"`` it is 1/2 at x1 and x3.
    """
    f = interval_map(d)
    worst = Fraction(0)
    for t in samples:
        t = Fraction(t)
        worst = max(worst, abs(interval_poincare(t, d, tie) - f(t)))
    return worst


def empirical_breakpoints(
    d: DTriple, resolution: int = 10_000, width=Fraction(1, 10 ** 12), tie: str = "lower"
) -> list:
    """Locate the jumps of ``t -> phi^-1(F(phi(t)))`` on a grid, refined by bisection.

    On a continuity piece the map has slope exactly -1/2, so any other difference
    quotient between two points marks a jump between them.
    """
    width = Fraction(width)

    def g(t):
        return interval_poincare(t, d, tie)

    def jumps(a, ga, b, gb):
        return gb - ga != -(b - a) / 2

    found = []
    grid = [Fraction(k, resolution) for k in range(resolution)]
    vals = [g(t) for t in grid]
    for a, ga, b, gb in zip(grid, vals, grid[1:], vals[1:]):
        if not jumps(a, ga, b, gb):
            continue
        while b - a > width:
            m = (a + b) / 2
            gm = g(m)
            if jumps(a, ga, m, gm):
                b, gb = m, gm
            else:
                a, ga = m, gm
        found.append((a + b) / 2)
    if len(found) != 3:
        raise BreakpointAnomaly(f"found {len(found)} discontinuities instead of 3", found)
    return found
