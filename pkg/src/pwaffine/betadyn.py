"""beta-transformations, the integers ell / ell', factor censuses and backward orbits.

``T_beta(x) = {beta x}`` and ``T_-beta(x) = {-beta x}`` on [0, 1). For a theorem-form
contraction f with positive (negative) slope, each preimage step
``f^-(k+1)(x_i)`` equals ``T_beta`` (``T_-beta``) applied to ``f^-k(x_i)``, for as
long as the preimage exists. :func:`backward_equals_transform` checks this.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .contraction import PiecewiseAffineContraction, evaluate, image_components, preimage
from .errors import CorrespondenceMismatch
from .exactnum import DigitStream, format_rational


def t_beta(x, beta: int) -> Fraction:
    """``T_beta(x) = beta*x + 1 - r`` for ``x in [(r-1)/beta, r/beta)``."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError(f"{x} is outside [0, 1)")
    r = math.floor(beta * x) + 1
    return beta * x + 1 - r


def t_neg_beta(x, beta: int) -> Fraction:
    """``T_-beta(x) = -beta*x + r`` for ``x in ((r-1)/beta, r/beta]``, and ``T_-beta(0) = 0``."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError(f"{x} is outside [0, 1)")
    if x == 0:
        return Fraction(0)
    r = math.ceil(beta * x)
    return r - beta * x


def square_identity_check(x, beta: int) -> bool:
    """Does ``T_-beta(T_-beta(x)) == T_{beta^2}(x)`` hold exactly?"""
    return t_neg_beta(t_neg_beta(x, beta), beta) == t_beta(x, beta * beta)


def _gap_width(beta, n):
    return (1 - Fraction(1, beta)) / (n + 1)


def ell(beta: int, n: int) -> int:
    """Least k >= 1 with ``2 beta^-k < (1 - 1/beta)/(n + 1)``."""
    if beta < 2 or n < 2:
        raise ValueError("beta and n must be >= 2")
    target = _gap_width(beta, n)
    k = 1
    while 2 * Fraction(1, beta ** k) >= target:
        k += 1
    return k


def ell_prime(beta: int, n: int) -> int:
    """Least k >= 1 with ``2 beta^-2k < (1 - 1/beta)/(n + 1)``."""
    if beta < 2 or n < 2:
        raise ValueError("beta and n must be >= 2")
    target = _gap_width(beta, n)
    k = 1
    while 2 * Fraction(1, beta ** (2 * k)) >= target:
        k += 1
    return k


def ell_closed_form(beta: int, n: int) -> int:
    """``1 + ceil(log(2(n+1)/(beta-1)) / log beta)`` with the strict ceiling, evaluated exactly.

    The strict ceiling of ``log_beta(Q)`` is the least m with ``beta**m > Q``;
    Q = 2(n+1)/(beta-1) exceeds 1/beta, so m >= 0.
    """
    q = Fraction(2 * (n + 1), beta - 1)
    m = 0
    while beta ** m <= q:
        m += 1
    return 1 + m


def ell_prime_closed_form(beta: int, n: int, strict: bool = True) -> int:
    """``ceil(1/2 + log(2(n+1)/(beta-1)) / (2 log beta))``, evaluated exactly.

    With Q = 2(n+1)/(beta-1) this is the least m >= 1 with ``beta**(2m-1) > Q``
    under the strict ceiling, or ``>= Q`` under the ordinary one.
    """
    q = Fraction(2 * (n + 1), beta - 1)
    m = 1
    while beta ** (2 * m - 1) < q or (strict and beta ** (2 * m - 1) == q):
        m += 1
    return m


@dataclass
class FactorCensus:
    k: int
    base: int
    count: int
    missing: list

    @property
    def complete(self) -> bool:
        return self.count == self.base ** self.k

    def to_json(self):
        return {
            "k": self.k,
            "base": self.base,
            "count": self.count,
            "missing": [_word_str(w, self.base) for w in self.missing],
        }


def _word_str(word, base):
    if base <= 10:
        return "".join(map(str, word))
    return ",".join(map(str, word))


def factor_census(prefix, k: int, base: int) -> FactorCensus:
    """Distinct length-k factors of a finite digit prefix, and the words never seen."""
    prefix = list(prefix)
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(prefix) < k:
        raise ValueError(f"prefix of length {len(prefix)} is shorter than k={k}")
    if any(not 0 <= d < base for d in prefix):
        raise ValueError(f"prefix has digits outside 0..{base - 1}")
    seen = {tuple(prefix[i:i + k]) for i in range(len(prefix) - k + 1)}
    missing = [w for w in itertools.product(range(base), repeat=k) if w not in seen]
    return FactorCensus(k, base, len(seen), missing)


def richness_evidence(stream: DigitStream, k: int, length: int) -> str:
    """One-line statement about length-k word coverage, never a proof of richness."""
    census = factor_census(stream.prefix(length), k, stream.base)
    if census.complete:
        return (
            f"all {census.count} words of length {k} occur: p_w({k}) = {stream.base}^{k} "
            f"confirmed by prefix of length {length}"
        )
    return (
        f"{len(census.missing)} of {stream.base ** k} words of length {k} not seen in a "
        f"prefix of length {length}: not yet confirmed"
    )


VARIANTS = ("plus", "minus", "squared")


def transformation(beta: int, variant: str) -> Callable[[Fraction], Fraction]:
    if variant == "plus":
        return lambda x: t_beta(x, beta)
    if variant == "minus":
        return lambda x: t_neg_beta(x, beta)
    if variant == "squared":
        return lambda x: t_beta(x, beta * beta)
    raise ValueError(f"variant must be one of {VARIANTS}")


@dataclass
class BetaOrbitReport:
    seed: Fraction
    beta: int
    variant: str
    preperiod: list = field(default_factory=list)
    cycle: list = field(default_factory=list)
    terminated_reason: str = "Cycle"
    points: list = field(default_factory=list)

    def to_json(self):
        return {
            "seed": format_rational(self.seed),
            "beta": self.beta,
            "map": {"plus": "T_beta", "minus": "T_-beta", "squared": "T_beta^2"}[self.variant],
            "preperiod": [format_rational(p) for p in self.preperiod],
            "cycle": [format_rational(p) for p in self.cycle],
            "terminated_reason": self.terminated_reason,
        }


def beta_orbit(x, beta: int, variant: str = "plus", max_steps: int = 10_000, within=None) -> BetaOrbitReport:
    """Eventually periodic decomposition of the orbit of a rational under T_beta, T_-beta or T_beta^2.

    ``within`` is an optional membership predicate; the orbit stops with reason
    ``LeftImage`` at the first point that fails it.
    """
    x = seed = Fraction(x)
    step = transformation(beta, variant)
    points, seen = [], {}
    reason = "BoundExceeded"
    for _ in range(max_steps + 1):
        if x in seen:
            reason = "Cycle"
            break
        if within is not None and not within(x):
            reason = "LeftImage"
            points.append(x)
            break
        seen[x] = len(points)
        points.append(x)
        x = step(x)
    rep = BetaOrbitReport(seed, beta, variant, terminated_reason=reason, points=points)
    if reason == "Cycle":
        start = seen[x]
        rep.preperiod, rep.cycle = points[:start], points[start:]
    return rep


def brute_force_preimage(f: PiecewiseAffineContraction, y) -> Fraction | None:
    """Preimage oracle: try the affine candidate of every branch, keep those f maps to y.

    Membership is decided by forward evaluation (``f(z) == y``), not by the interval
    test inside :func:`pwaffine.contraction.preimage`.
    """
    y = Fraction(y)
    hits = set()
    for a in f.intercepts:
        z = (y - a) * f.beta * f.slope_sign
        if 0 <= z < 1 and evaluate(f, z) == y:
            hits.add(z)
    if len(hits) > 1:
        raise ValueError("map is not injective")
    return hits.pop() if hits else None


@dataclass
class BackwardReport:
    x: Fraction
    chain: list
    transform_iterates: list
    status: str  # Dead | Cyclic | DepthExceeded
    death_index: int | None = None
    death_point: Fraction | None = None
    death_in_gap: bool | None = None

    def to_json(self):
        return {
            "x": format_rational(self.x),
            "chain": [format_rational(p) for p in self.chain],
            "transform_iterates": [format_rational(p) for p in self.transform_iterates],
            "status": self.status,
            "death_index": self.death_index,
            "death_point": None if self.death_point is None else format_rational(self.death_point),
            "death_in_gap": self.death_in_gap,
        }


def backward_equals_transform(f: PiecewiseAffineContraction, x_i, max_steps: int = 10_000, oracle: bool = True) -> BackwardReport:
    """Run iterated preimages and the matching transformation side by side.

    Every surviving preimage must equal the transformation iterate, and must agree
    with the brute-force oracle when ``oracle`` is set; a disagreement raises
    :class:`CorrespondenceMismatch`. When ``f^-d(x_i)`` is the first preimage that
    does not exist, ``death_index`` is d and the last chain point ``f^-(d-1)(x_i)``
    must lie in a gap of f(I).
    """
    if not f.theorem_form or not f.exact:
        raise ValueError("needs a theorem-form map with rational breakpoints")
    x_i = Fraction(x_i)
    step = transformation(f.beta, "plus" if f.slope_sign > 0 else "minus")
    chain, iterates = [x_i], [x_i]
    seen = {x_i}
    for k in range(max_steps):
        cur = chain[-1]
        pre = preimage(f, cur)
        if oracle and pre != brute_force_preimage(f, cur):
            raise CorrespondenceMismatch(f"preimage of {cur} disagrees with the oracle")
        t = step(cur)
        iterates.append(t)
        if pre is None:
            gaps = image_components(f).gaps
            in_gap = any(cur in g for g in gaps)
            if not in_gap:
                raise CorrespondenceMismatch(f"{cur} has no preimage but is not in a gap of f(I)")
            return BackwardReport(x_i, chain, iterates, "Dead", k + 1, cur, in_gap)
        if pre != t:
            raise CorrespondenceMismatch(f"f^-{k + 1}({x_i}) = {pre} but transform gives {t}")
        if pre in seen:
            chain.append(pre)
            return BackwardReport(x_i, chain, iterates, "Cyclic")
        seen.add(pre)
        chain.append(pre)
    return BackwardReport(x_i, chain, iterates, "DepthExceeded")
