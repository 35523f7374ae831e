"""Seeded property suites for the cross-cutting identities.

Each suite returns a :class:`SuiteResult` with the number of exact checks run and
every failure found. The seeds are part of the result so any run can be replayed.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .betadyn import backward_equals_transform, square_identity_check
from .contraction import build_map, detect_cycle, image_components
from .errors import CorrespondenceMismatch
from .quasipart import analyze
from .serversim import DTriple, breakpoints_from_d, conjugacy_residual, d_from_x

DEFAULT_SEED = 20240601


@dataclass
class SuiteResult:
    name: str
    seed: int
    checks: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    maps: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        return f"{word} {self.name}: {self.checks} checks, {len(self.failures)} failures ({self.seconds:.2f}s)"

    def to_json(self):
        return {
            "suite": self.name,
            "seed": self.seed,
            "checks": self.checks,
            "failures": [str(f) for f in self.failures[:50]],
            "n_failures": len(self.failures),
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
        }


def random_fraction(rng, max_den, lo=0, hi=1):
    """Uniform-ish rational strictly inside (lo, hi) with denominator <= max_den."""
    lo, hi = Fraction(lo), Fraction(hi)
    while True:
        q = rng.randint(1, max_den)
        p = rng.randint(0, q)
        x = lo + (hi - lo) * Fraction(p, q)
        if lo < x < hi:
            return x


def random_theorem_map(rng, beta=None, n=None, sign=None, max_den=50):
    """A random map in theorem form with rational breakpoints (denominators <= max_den)."""
    beta = beta or rng.choice((2, 3))
    n = n or rng.randint(2, 5)
    sign = sign or rng.choice((1, -1))
    cuts = set()
    while len(cuts) < n - 1:
        cuts.add(random_fraction(rng, max_den))
    bps = (Fraction(0), *sorted(cuts), Fraction(1))
    alphas = [rng.randint(1, beta) for _ in range(n)]
    if sign < 0:
        alphas[0] = rng.randint(1, beta - 1)
    return build_map(beta, sign, bps, alphas)


def lemma_square(seed=DEFAULT_SEED, per_beta=10_000, betas=(2, 3, 4, 5), max_den=10_000):
    res = SuiteResult("lemma-square", seed)
    rng = random.Random(seed)
    for beta in betas:
        for _ in range(per_beta):
            q = rng.randint(1, max_den)
            x = Fraction(rng.randrange(q), q)
            res.checks += 1
            if not square_identity_check(x, beta):
                res.failures.append(f"beta={beta}, x={x}")
    return res


def backward_orbit(seed=DEFAULT_SEED, n_maps=50):
    """Preimage chains against T_beta / T_-beta on random maps of both signs."""
    res = SuiteResult("backward-orbit", seed)
    rng = random.Random(seed)
    for sign in (1, -1):
        for _ in range(n_maps):
            f = random_theorem_map(rng, sign=sign)
            res.maps.append(f)
            for x in f.breakpoints[1:-1]:
                res.checks += 1
                try:
                    backward_equals_transform(f, x)
                except CorrespondenceMismatch as exc:
                    res.failures.append(f"{f!r}, x={x}: {exc}")
    return res


def roundtrip(seed=DEFAULT_SEED, n=100, max_den=1000):
    res = SuiteResult("roundtrip", seed)
    rng = random.Random(seed)
    third = Fraction(1, 3)
    for _ in range(n):
        xs = tuple(random_fraction(rng, max_den, k * third, (k + 1) * third) for k in range(3))
        d = d_from_x(*xs)
        back = breakpoints_from_d(DTriple.exact(*d.values))
        res.checks += 2
        if back != xs:
            res.failures.append(f"x={xs} -> {back}")
        d2 = d_from_x(*back)
        if d2.values != d.values:
            res.failures.append(f"d={d.values} -> {d2.values}")
    return res


def conjugacy(seed=DEFAULT_SEED, n_params=20, n_samples=100, max_den=1000):
    res = SuiteResult("conjugacy", seed)
    rng = random.Random(seed)
    for _ in range(n_params):
        d = DTriple.exact(*(random_fraction(rng, 100, 0, 5) for _ in range(3)))
        samples = [random_fraction(rng, max_den) for _ in range(n_samples)]
        samples += breakpoints_from_d(d)
        r = conjugacy_residual(d, samples)
        res.checks += len(samples)
        if r != 0:
            res.failures.append(f"d={d.values}: residual {r}")
    return res


def gap_bound(seed=DEFAULT_SEED, n_maps=200):
    res = SuiteResult("gap-bound", seed)
    rng = random.Random(seed)
    for _ in range(n_maps):
        f = random_theorem_map(rng)
        res.maps.append(f)
        bound = (1 - Fraction(1, f.beta)) / (f.n + 1)
        res.checks += 1
        gap = image_components(f).max_gap
        if gap < bound:
            res.failures.append(f"{f!r}: max gap {gap} < {bound}")
    return res


def attractor(seed=DEFAULT_SEED, n_maps=100, n_seeds=50, sign=1, max_den=50):
    """Quasi-partition pipeline plus forward orbits from random seeds on random maps."""
    res = SuiteResult("attractor", seed)
    rng = random.Random(seed)
    for _ in range(n_maps):
        f = random_theorem_map(rng, sign=sign, max_den=max_den)
        res.maps.append(f)
        rep = analyze(f)
        res.checks += 1
        if rep.verdict != "finite":
            res.failures.append(f"{f!r}: verdict {rep.verdict}")
            continue
        known = set(rep.cycles.all)
        points = rep.attractor.points
        for _ in range(n_seeds):
            x = Fraction(rng.randrange(10_000), 10_000)
            cyc = detect_cycle(f, x, max_steps=10_000)
            res.checks += 1
            if not cyc.found:
                res.failures.append(f"{f!r}, seed {x}: {cyc.status.value}")
            elif cyc.cycle not in known or not set(cyc.cycle) <= points:
                res.failures.append(f"{f!r}, seed {x}: cycle {cyc.cycle} not confirmed")
    return res


SUITES = {
    "lemma-square": lemma_square,
    "backward-orbit": backward_orbit,
    "roundtrip": roundtrip,
    "conjugacy": conjugacy,
    "gap-bound": gap_bound,
    "attractor": attractor,
}


def run(name: str, seed: int = DEFAULT_SEED) -> list:
    names = list(SUITES) if name == "all" else [name]
    out = []
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {n!r}; choose from {sorted(SUITES)} or 'all'")
        t0 = time.perf_counter()
        r = SUITES[n](seed=seed)
        r.seconds = time.perf_counter() - t0
        out.append(r)
    return out
