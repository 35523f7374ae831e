"""n-interval piecewise ±(1/beta)-affine contractions of [0, 1).

On the i-th half-open piece ``[x_{i-1}, x_i)`` the map is ``x -> slope*x + a_i`` with
``slope = ±1/beta``. The two theorem forms parametrise the intercepts by integers
``alpha_i in {1..beta}``:

* positive slope: ``a_i = (alpha_i - 1)/beta``
* negative slope: ``a_i = alpha_i/beta`` (and ``alpha_1 != beta``)

Arbitrary rational intercepts are accepted too, as long as every branch image stays
inside [0, 1); such maps report ``theorem_form == False``.

Breakpoints may be digit streams. Orbits of rational seeds stay rational either
way, because only the branch decisions look at the breakpoints.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import Undecidable
from .exactnum import (
    DEFAULT_COMPARE_DIGITS,
    DigitStream,
    RealValue,
    compare,
    enclosure,
    format_rational,
    parse_number,
    to_json,
)

DEFAULT_EPS = Fraction(1, 10 ** 12)


@dataclass(frozen=True)
class PiecewiseAffineContraction:
    beta: int
    slope_sign: int
    breakpoints: tuple
    intercepts: tuple
    alphas: tuple | None = None
    max_digits: int = field(default=DEFAULT_COMPARE_DIGITS, compare=False)

    @property
    def n(self) -> int:
        return len(self.intercepts)

    @property
    def slope(self) -> Fraction:
        return Fraction(self.slope_sign, self.beta)

    @property
    def exact(self) -> bool:
        """True when every breakpoint is rational."""
        return not any(isinstance(x, DigitStream) for x in self.breakpoints)

    @property
    def theorem_form(self) -> bool:
        return self.alphas is not None

    def branch_map(self, i: int, x):
        return self.slope * x + self.intercepts[i - 1]

    def __call__(self, x):
        return evaluate(self, x)

    def __repr__(self):
        bps = ", ".join(
            x.name if isinstance(x, DigitStream) else str(x) for x in self.breakpoints
        )
        tail = f"alphas={self.alphas}" if self.alphas else f"intercepts={[str(a) for a in self.intercepts]}"
        return f"PiecewiseAffineContraction(beta={self.beta}, sign={self.slope_sign:+d}, bp=({bps}), {tail})"


def _as_real(x):
    if isinstance(x, DigitStream):
        return x
    if isinstance(x, str):
        return parse_number(x)
    return Fraction(x)


def _validate(f: PiecewiseAffineContraction):
    if f.beta < 2:
        raise ValueError("beta must be an integer >= 2")
    if f.slope_sign not in (1, -1):
        raise ValueError("slope_sign must be +1 or -1")
    bps = f.breakpoints
    if f.n < 2 or len(bps) != f.n + 1:
        raise ValueError("need n >= 2 branches and n + 1 breakpoints")
    if isinstance(bps[0], DigitStream) or isinstance(bps[-1], DigitStream) or bps[0] != 0 or bps[-1] != 1:
        raise ValueError("breakpoints must start at 0 and end at 1")
    for lo, hi in zip(bps, bps[1:]):
        # Undecidable propagates: an unverifiable order is a construction failure
        if compare(lo, hi, f.max_digits) >= 0:
            raise ValueError("breakpoints must be strictly increasing")
    if f.alphas is not None:
        if any(not 1 <= a <= f.beta for a in f.alphas):
            raise ValueError(f"alphas must lie in 1..{f.beta}")
        if f.slope_sign < 0 and f.alphas[0] == f.beta:
            raise ValueError("negative slope requires alpha_1 != beta")
    else:
        for i in range(1, f.n + 1):
            lo, hi = _branch_image_bounds(f, i)
            if lo < 0 or hi > 1:
                raise ValueError(f"image of branch {i} leaves [0, 1)")
            # negative slope attains its supremum at the closed left end
            if hi == 1 and f.slope_sign < 0:
                raise ValueError(f"image of branch {i} reaches 1")


def _branch_image_bounds(f, i, digits=64):
    """Outer rational bounds on the image of branch i."""
    lo_x = enclosure(f.breakpoints[i - 1], digits)[0]
    hi_x = enclosure(f.breakpoints[i], digits)[1]
    ends = sorted([f.branch_map(i, lo_x), f.branch_map(i, hi_x)])
    return ends[0], ends[1]


def build_map(beta: int, slope_sign: int, breakpoints: Sequence, alphas: Sequence[int]) -> PiecewiseAffineContraction:
    """Theorem-form map from integer ``alphas``."""
    beta, slope_sign = int(beta), int(slope_sign)
    alphas = tuple(int(a) for a in alphas)
    if slope_sign > 0:
        intercepts = tuple(Fraction(a - 1, beta) for a in alphas)
    else:
        intercepts = tuple(Fraction(a, beta) for a in alphas)
    f = PiecewiseAffineContraction(
        beta, slope_sign, tuple(_as_real(x) for x in breakpoints), intercepts, alphas
    )
    _validate(f)
    return f


def from_intercepts(beta: int, slope_sign: int, breakpoints: Sequence, intercepts: Sequence) -> PiecewiseAffineContraction:
    """General ``x -> ±x/beta + a_i`` map; flagged as outside the theorem forms."""
    f = PiecewiseAffineContraction(
        int(beta),
        int(slope_sign),
        tuple(_as_real(x) for x in breakpoints),
        tuple(Fraction(a) for a in intercepts),
        None,
    )
    _validate(f)
    return f


class AffineImage(NamedTuple):
    """Deferred exact value ``slope * x + intercept`` of a stream point ``x``."""

    branch: int
    x: DigitStream
    slope: Fraction
    intercept: Fraction

    def enclosure(self, n: int):
        lo, hi = enclosure(self.x, n)
        ends = sorted([self.slope * lo + self.intercept, self.slope * hi + self.intercept])
        return ends[0], ends[1]


def _check_domain(f, x):
    if compare(x, 0, f.max_digits) < 0 or compare(x, 1, f.max_digits) >= 0:
        raise ValueError(f"{x!r} is outside [0, 1)")


def branch_of(f: PiecewiseAffineContraction, x: RealValue) -> int:
    """The unique i with ``x_{i-1} <= x < x_i``; raises Undecidable if it cannot be pinned."""
    _check_domain(f, x)
    lo, hi = 1, f.n
    bps = f.breakpoints
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if compare(bps[mid - 1], x, f.max_digits) <= 0:
            lo = mid
        else:
            hi = mid - 1
    return lo


def evaluate(f: PiecewiseAffineContraction, x: RealValue):
    i = branch_of(f, x)
    if isinstance(x, DigitStream):
        return AffineImage(i, x, f.slope, f.intercepts[i - 1])
    return f.branch_map(i, Fraction(x))


@dataclass
class Orbit:
    seed: RealValue
    points: list
    branches: list

    def to_json(self):
        return {
            "seed": to_json(self.seed),
            "points": [format_rational(p) for p in self.points],
            "decimal": [float(p) for p in self.points],
            "branches": self.branches,
        }


def forward_orbit(f: PiecewiseAffineContraction, x, max_steps: int) -> Orbit:
    """``x, f(x), ..., f^max_steps(x)`` with the branch used at each step."""
    x = Fraction(x)
    points, branches = [x], []
    for _ in range(max_steps):
        i = branch_of(f, x)
        x = f.branch_map(i, x)
        branches.append(i)
        points.append(x)
    return Orbit(points[0], points, branches)


class CycleStatus(enum.Enum):
    CYCLE = "cycle"
    NO_CYCLE_WITHIN_BOUND = "no_cycle_within_bound"
    UNDECIDABLE = "undecidable"


@dataclass
class CycleResult:
    """Outcome of :func:`detect_cycle`.

    ``cycle`` lists the limit cycle starting from its smallest point. ``exact_hit``
    says the orbit lands on it exactly; otherwise the orbit only converges to it and
    ``certified`` says whether convergence was proved (trapping argument) or merely
    observed within ``eps``. ``genuine`` is False for limit cycles that f does not
    realise itself, e.g. the point 1 approached from inside [0, 1).
    """

    status: CycleStatus
    preperiod: int | None = None
    cycle: tuple = ()
    exact_hit: bool = False
    certified: bool = False
    genuine: bool = False
    steps: int = 0
    message: str = ""

    @property
    def found(self) -> bool:
        return self.status is CycleStatus.CYCLE

    def to_json(self):
        return {
            "status": self.status.value,
            "preperiod": self.preperiod,
            "cycle": [format_rational(c) for c in self.cycle],
            "cycle_decimal": [float(c) for c in self.cycle],
            "exact_hit": self.exact_hit,
            "certified": self.certified,
            "genuine": self.genuine,
            "steps": self.steps,
            "message": self.message,
        }


def canonical_cycle(points) -> tuple:
    """Rotate a cycle so it starts at its smallest point."""
    points = list(points)
    k = points.index(min(points))
    return tuple(points[k:] + points[:k])


def is_genuine_cycle(f, cycle) -> bool:
    """True when every point lies in [0, 1) and f maps the points cyclically."""
    if any(not 0 <= c < 1 for c in cycle):
        return False
    try:
        return all(evaluate(f, c) == cycle[(j + 1) % len(cycle)] for j, c in enumerate(cycle))
    except Undecidable:
        return False


def composite_fixed_point(f, itinerary):
    a, b = Fraction(1), Fraction(0)
    for i in itinerary:
        a, b = f.slope * a, f.slope * b + f.intercepts[i - 1]
    c = b / (1 - a)
    pts = [c]
    for i in itinerary[:-1]:
        pts.append(f.branch_map(i, pts[-1]))
    return pts


def _certify(f, x, itinerary, cpts):
    """Prove the orbit of x converges to the cycle cpts along ``itinerary``.

    The segment between the orbit point and the matching cycle point (open at the
    cycle end) must sit inside the predicted branch at every step of a loop with
    positive total slope; then the loop maps the segment strictly into itself.
    """
    p = len(itinerary)
    loops = p if (f.slope_sign > 0 or p % 2 == 0) else 2 * p
    bps = f.breakpoints
    for j in range(loops):
        i, c = itinerary[j % p], cpts[j % p]
        if x == c or not 0 <= x < 1 or branch_of(f, x) != i:
            return False
        if x < c:
            if compare(c, bps[i], f.max_digits) > 0:
                return False
        elif compare(c, bps[i - 1], f.max_digits) < 0:
            return False
        x = f.branch_map(i, x)
    return True


def detect_cycle(
    f: PiecewiseAffineContraction,
    x,
    max_steps: int = 1000,
    eps=None,
    max_period: int | None = None,
) -> CycleResult:
    """Find the cycle the orbit of the rational seed ``x`` lands on or converges to.

    Exact revisits are found by set membership. Otherwise, whenever the branch
    itinerary repeats twice with some period p, the fixed point of the composed
    affine branches is computed and convergence is certified exactly. With ``eps``
    set, an uncertified eps-revisit confirmed over one full loop is accepted too.
    """
    x = Fraction(x)
    if max_period is None:
        max_period = max(1, max_steps // 2)
    points, branches = [x], []
    seen = {x: 0}
    try:
        for k in range(max_steps + 1):
            cur = points[-1]
            for p in range(1, min(max_period, k // 2) + 1):
                if branches[k - p:] == branches[k - 2 * p:k - p]:
                    itin = branches[k - p:]
                    cpts = composite_fixed_point(f, itin)
                    if _certify(f, cur, itin, cpts):
                        cyc = canonical_cycle(cpts)
                        return CycleResult(
                            CycleStatus.CYCLE, k, cyc, False, True,
                            is_genuine_cycle(f, cyc), k,
                        )
                    break
            if eps is not None:
                res = _eps_cycle(f, points, eps, max_period)
                if res is not None:
                    return res
            if k == max_steps:
                break
            i = branch_of(f, cur)
            nxt = f.branch_map(i, cur)
            branches.append(i)
            if nxt in seen:
                start = seen[nxt]
                cyc = canonical_cycle(points[start:])
                return CycleResult(
                    CycleStatus.CYCLE, start, cyc, True, True, True, k + 1
                )
            seen[nxt] = len(points)
            points.append(nxt)
    except Undecidable as exc:
        return CycleResult(CycleStatus.UNDECIDABLE, steps=len(points) - 1, message=str(exc))
    return CycleResult(
        CycleStatus.NO_CYCLE_WITHIN_BOUND, steps=max_steps,
        message=f"no cycle within {max_steps} steps",
    )


def _eps_cycle(f, points, eps, max_period):
    k = len(points) - 1
    eps = Fraction(eps)
    for p in range(1, min(max_period, k // 2) + 1):
        if all(abs(points[k - j] - points[k - j - p]) < eps for j in range(p)):
            cyc = canonical_cycle(points[k - p + 1:])
            return CycleResult(
                CycleStatus.CYCLE, k - 2 * p + 1, cyc, False, False,
                is_genuine_cycle(f, cyc), k, f"eps-revisit within {eps}",
            )
    return None


class Interval(NamedTuple):
    lo: Fraction
    hi: Fraction
    lo_closed: bool
    hi_closed: bool

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x):
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def __str__(self):
        return (
            f"{'[' if self.lo_closed else '('}{self.lo}, {self.hi}{']' if self.hi_closed else ')'}"
        )


class ImageComponents(NamedTuple):
    images: list
    gaps: list
    exact: bool

    @property
    def max_gap(self) -> Fraction:
        return max((g.length for g in self.gaps), default=Fraction(0))


def _merge(intervals):
    out = []
    for iv in sorted(intervals, key=lambda iv: (iv.lo, not iv.lo_closed)):
        if out:
            last = out[-1]
            if iv.lo < last.hi or (iv.lo == last.hi and (iv.lo_closed or last.hi_closed)):
                if iv.hi > last.hi:
                    out[-1] = Interval(last.lo, iv.hi, last.lo_closed, iv.hi_closed)
                elif iv.hi == last.hi and iv.hi_closed and not last.hi_closed:
                    out[-1] = last._replace(hi_closed=True)
                continue
        out.append(iv)
    return out


def _complement(merged):
    """Complement of a merged interval list inside [0, 1)."""
    gaps = []
    cur, cur_closed = Fraction(0), True
    for iv in merged:
        if cur < iv.lo or (cur == iv.lo and cur_closed and not iv.lo_closed):
            gaps.append(Interval(cur, iv.lo, cur_closed, not iv.lo_closed))
        cur, cur_closed = iv.hi, not iv.hi_closed
    if cur < 1:
        gaps.append(Interval(cur, Fraction(1), cur_closed, False))
    return gaps


def image_components(f: PiecewiseAffineContraction, digits: int = 64) -> ImageComponents:
    """Branch images of f (merged) and the gaps ``[0, 1) \\ f(I)``.

    With stream breakpoints the images are outer rational enclosures, so every
    returned gap is a subset of a true gap.
    """
    images = []
    for i in range(1, f.n + 1):
        left, right = f.breakpoints[i - 1], f.breakpoints[i]
        if f.exact:
            u, v = f.branch_map(i, left), f.branch_map(i, right)
            if f.slope_sign > 0:
                images.append(Interval(u, v, True, False))
            else:
                images.append(Interval(v, u, False, True))
        else:
            lo, hi = _branch_image_bounds(f, i, digits)
            images.append(Interval(lo, hi, True, True))
    merged = _merge(images)
    return ImageComponents(merged, _complement(merged), f.exact)


def preimage(f: PiecewiseAffineContraction, y) -> Fraction | None:
    """The unique z in [0, 1) with f(z) = y, or None when y is not in f(I)."""
    y = Fraction(y)
    found = []
    for i in range(1, f.n + 1):
        z = (y - f.intercepts[i - 1]) / f.slope
        if compare(f.breakpoints[i - 1], z, f.max_digits) <= 0 and compare(z, f.breakpoints[i], f.max_digits) < 0:
            found.append(z)
    if len(found) > 1:
        raise ValueError(f"map is not injective: {y} has preimages {found}")
    return found[0] if found else None


def map_to_json(f: PiecewiseAffineContraction) -> dict:
    out = {
        "beta": f.beta,
        "slope_sign": f.slope_sign,
        "breakpoints": [to_json(x) for x in f.breakpoints],
    }
    if f.alphas is not None:
        out["alphas"] = list(f.alphas)
    else:
        out["intercepts"] = [format_rational(a) for a in f.intercepts]
        out["note"] = "outside theorem hypotheses"
    return out


def map_from_json(data) -> PiecewiseAffineContraction:
    if isinstance(data, str):
        data = json.loads(data)
    bps = [
        parse_number(x["generator"]) if isinstance(x, dict) else parse_number(str(x))
        for x in data["breakpoints"]
    ]
    if "alphas" in data:
        return build_map(data["beta"], data["slope_sign"], bps, data["alphas"])
    return from_intercepts(
        data["beta"], data["slope_sign"], bps, [Fraction(a) for a in data["intercepts"]]
    )
