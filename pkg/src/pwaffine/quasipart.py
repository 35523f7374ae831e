"""Finite attractors of rational contractions via invariant quasi-partitions.

Pipeline for a map f with rational breakpoints:

1. :func:`backward_closure` follows ``x_i, f^-1(x_i), f^-2(x_i), ...`` for every
   interior breakpoint until the preimage dies or the chain revisits a point.
2. :func:`build_partition` cuts (0, 1) at the collected points H. No open piece
   contains a breakpoint and no piece can map onto a point of H, so f maps each
   piece J_s into a single piece J_tau(s).
3. :func:`attractor_superset` takes the periodic pieces of tau and solves for the
   fixed point of the composed branches around each tau-cycle. Together with the
   cut points G these form a finite set containing the global attractor.
4. :func:`confirmed_cycles` runs forward cycle detection to see which of those
   points forward orbits actually reach.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .contraction import (
    PiecewiseAffineContraction,
    composite_fixed_point,
    branch_of,
    detect_cycle,
    map_to_json,
    preimage,
)
from .errors import ConstructionViolation
from .exactnum import format_rational

DEFAULT_DEPTH = 10_000


def _fmt(xs):
    return [format_rational(x) for x in xs]


@dataclass
class Chain:
    x: Fraction
    points: list
    status: str  # Dead | Cyclic | DepthExceeded


@dataclass
class BackwardClosure:
    chains: list
    H: list

    @property
    def complete(self) -> bool:
        return all(c.status != "DepthExceeded" for c in self.chains)

    def to_json(self):
        return {
            "chains": [
                {"x": format_rational(c.x), "points": _fmt(c.points), "status": c.status}
                for c in self.chains
            ],
            "H": _fmt(self.H),
        }


def _require_rational(f):
    if not f.exact:
        raise ValueError("quasi-partitions need rational breakpoints")


def backward_closure(f: PiecewiseAffineContraction, max_depth: int = DEFAULT_DEPTH) -> BackwardClosure:
    _require_rational(f)
    chains = []
    for x in f.breakpoints[1:-1]:
        pts, seen = [x], {x}
        status = "DepthExceeded"
        for _ in range(max_depth):
            pre = preimage(f, pts[-1])
            if pre is None:
                status = "Dead"
                break
            if pre in seen:
                status = "Cyclic"
                break
            seen.add(pre)
            pts.append(pre)
        chains.append(Chain(x, pts, status))
    H = sorted({p for c in chains for p in c.points if 0 < p < 1})
    return BackwardClosure(chains, H)


@dataclass
class QuasiPartition:
    """Open intervals ``J_s = (G[s], G[s+1])`` and the index map tau (0-based)."""

    G: list
    tau: list
    branches: list

    @property
    def m(self) -> int:
        return len(self.tau)

    @property
    def intervals(self):
        return list(zip(self.G, self.G[1:]))

    def to_json(self):
        return {
            "G": _fmt(self.G),
            "intervals": [[format_rational(a), format_rational(b)] for a, b in self.intervals],
            "tau": [t + 1 for t in self.tau],
        }


def _image(f, i, lo, hi):
    u, v = f.branch_map(i, lo), f.branch_map(i, hi)
    return (u, v) if u <= v else (v, u)


def build_partition(f: PiecewiseAffineContraction, H) -> QuasiPartition:
    _require_rational(f)
    G = sorted(set(Fraction(h) for h in H) | {Fraction(0), Fraction(1)})
    missing = [x for x in f.breakpoints[1:-1] if x not in G]
    if missing:
        raise ValueError(f"H must contain every interior breakpoint; missing {missing}")
    tau, branches = [], []
    for lo, hi in zip(G, G[1:]):
        i = branch_of(f, lo)
        a, b = _image(f, i, lo, hi)
        t = bisect.bisect_right(G, a) - 1
        if b > G[t + 1]:
            raise ConstructionViolation(
                f"f(({lo}, {hi})) = ({a}, {b}) straddles {G[t + 1]}"
            )
        tau.append(t)
        branches.append(i)
    return QuasiPartition(G, tau, branches)


def verify_partition(f: PiecewiseAffineContraction, qp: QuasiPartition) -> bool:
    """Exact check that the intervals avoid breakpoints and f(J_s) lies in J_tau(s)."""
    G = qp.G
    if G[0] != 0 or G[-1] != 1 or any(a >= b for a, b in zip(G, G[1:])):
        return False
    if len(qp.tau) != len(G) - 1:
        return False
    bps = f.breakpoints
    for s, (lo, hi) in enumerate(qp.intervals):
        i = branch_of(f, lo)
        if hi > bps[i]:
            return False
        t = qp.tau[s]
        if not 0 <= t < qp.m:
            return False
        a, b = _image(f, i, lo, hi)
        if a < G[t] or b > G[t + 1]:
            return False
    return True


def tau_cycles(tau) -> list:
    """Cycles of the self-map tau of {0..m-1}, each listed from its first-visited node."""
    m = len(tau)
    state = [0] * m  # 0 new, 1 on current path, 2 done
    cycles = []
    for s in range(m):
        path = []
        u = s
        while state[u] == 0:
            state[u] = 1
            path.append(u)
            u = tau[u]
        if state[u] == 1:
            cycles.append(path[path.index(u):])
        for v in path:
            state[v] = 2
    return cycles


@dataclass
class AttractorReport:
    F: list
    G: list
    q: int
    P: list
    cycles: list
    centers: dict
    boundary: list = field(default_factory=list)

    @property
    def points(self) -> set:
        return set(self.F) | set(self.G)

    def to_json(self):
        return {
            "F": _fmt(self.F),
            "G": _fmt(self.G),
            "q": self.q,
            "P": [s + 1 for s in self.P],
            "tau_cycles": [[s + 1 for s in c] for c in self.cycles],
            "boundary": _fmt(self.boundary),
        }


def attractor_superset(f: PiecewiseAffineContraction, qp: QuasiPartition) -> AttractorReport:
    """F = fixed points of the composed branches around each tau-cycle, plus G.

    The composed slope is (±1/beta)^L with L the cycle length, so each fixed point
    exists and is unique; it lies in the closure of its interval. Points equal to 1
    (outside the domain) are also listed in ``boundary``.
    """
    cycles = tau_cycles(qp.tau)
    centers = {}
    for cyc in cycles:
        pts = composite_fixed_point(f, [qp.branches[s] for s in cyc])
        for s, c in zip(cyc, pts):
            lo, hi = qp.G[s], qp.G[s + 1]
            assert lo <= c <= hi, f"fixed point {c} outside closure of J_{s + 1}"
            centers[s] = c
    q = math.lcm(*(len(c) for c in cycles))
    F = sorted(set(centers.values()))
    P = sorted(centers)
    return AttractorReport(F, list(qp.G), q, P, cycles, centers, [c for c in F if not 0 <= c < 1])


@dataclass
class ConfirmedCycles:
    genuine: list
    limit_only: list
    anomalies: list
    outside_superset: list

    @property
    def all(self) -> list:
        return self.genuine + self.limit_only

    def to_json(self):
        return {
            "genuine": [_fmt(c) for c in self.genuine],
            "limit_only": [_fmt(c) for c in self.limit_only],
            "anomalies": self.anomalies,
            "outside_superset": [_fmt(c) for c in self.outside_superset],
        }


def confirmed_cycles(
    f: PiecewiseAffineContraction,
    qp: QuasiPartition,
    report: AttractorReport | None = None,
    max_steps: int = DEFAULT_DEPTH,
) -> ConfirmedCycles:
    """Cycles reached by forward orbits from F, G and the midpoint of every periodic interval.

    ``genuine`` cycles are realised by f itself; ``limit_only`` cycles are limits of
    orbits that f does not map onto itself, such as the boundary point 1.
    """
    if report is None:
        report = attractor_superset(f, qp)
    seeds = [c for c in report.F if 0 <= c < 1] + [g for g in report.G if 0 <= g < 1]
    seeds += [(qp.G[s] + qp.G[s + 1]) / 2 for s in report.P]
    superset = report.points
    genuine, limit_only, anomalies, outside = [], [], [], []
    for seed in dict.fromkeys(seeds):
        res = detect_cycle(f, seed, max_steps)
        if not res.found:
            anomalies.append({"seed": format_rational(seed), "status": res.status.value})
            continue
        bucket = genuine if res.genuine else limit_only
        if res.cycle not in bucket:
            bucket.append(res.cycle)
            if not set(res.cycle) <= superset:
                outside.append(res.cycle)
    return ConfirmedCycles(genuine, limit_only, anomalies, outside)


@dataclass
class QuasiPartitionReport:
    map: PiecewiseAffineContraction
    closure: BackwardClosure
    partition: QuasiPartition | None = None
    verified: bool = False
    attractor: AttractorReport | None = None
    cycles: ConfirmedCycles | None = None
    verdict: str = "inconclusive"

    def to_json(self):
        out = {"map": map_to_json(self.map), "verdict": self.verdict}
        out.update(self.closure.to_json())
        if self.partition is not None:
            out.update(self.partition.to_json())
            out["verified"] = self.verified
        if self.attractor is not None:
            out.update(self.attractor.to_json())
        if self.cycles is not None:
            out["confirmed_cycles"] = self.cycles.to_json()
        return out


def analyze(f: PiecewiseAffineContraction, max_depth: int = DEFAULT_DEPTH) -> QuasiPartitionReport:
    """Run the whole pipeline; the verdict is ``finite``, ``inconclusive`` or ``failed``.

    A chain that exceeds ``max_depth`` leaves the verdict inconclusive: the
    attractor may then contain a Cantor set.
    """
    closure = backward_closure(f, max_depth)
    rep = QuasiPartitionReport(f, closure)
    if not closure.complete:
        return rep
    rep.partition = build_partition(f, closure.H)
    rep.verified = verify_partition(f, rep.partition)
    if not rep.verified:
        rep.verdict = "failed"
        return rep
    rep.attractor = attractor_superset(f, rep.partition)
    rep.cycles = confirmed_cycles(f, rep.partition, rep.attractor, max_depth)
    ok = not rep.cycles.anomalies and not rep.cycles.outside_superset
    rep.verdict = "finite" if ok else "failed"
    return rep
