import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwaffine.betadyn import (
    backward_equals_transform,
    beta_orbit,
    brute_force_preimage,
    ell,
    ell_closed_form,
    ell_prime,
    ell_prime_closed_form,
    factor_census,
    richness_evidence,
    square_identity_check,
    t_beta,
    t_neg_beta,
)
from pwaffine.contraction import build_map, image_components
from pwaffine.errors import CorrespondenceMismatch
from pwaffine.exactnum import champernowne_stream, digits_of_rational, offset_add, rational_stream
from pwaffine.verify import random_theorem_map


@pytest.mark.parametrize("x,beta,y", [(F(1, 6), 2, F(1, 3)), (F(2, 3), 2, F(1, 3)), (F(1, 6), 4, F(2, 3))])
def test_t_beta(x, beta, y):
    assert t_beta(x, beta) == y


@pytest.mark.parametrize("x,beta,y", [(F(1, 6), 2, F(2, 3)), (F(0), 2, F(0)), (F(2, 3), 2, F(2, 3))])
def test_t_neg_beta(x, beta, y):
    assert t_neg_beta(x, beta) == y


def test_t_neg_beta_left_open_branches():
    # x = r/beta belongs to the branch ((r-1)/beta, r/beta], so it maps to 0
    assert t_neg_beta(F(1, 2), 2) == 0
    assert t_neg_beta(F(1, 3), 3) == 0
    assert t_beta(F(1, 2), 2) == 0
    with pytest.raises(ValueError):
        t_beta(F(1), 2)


@pytest.mark.parametrize("x,beta", [(F(1, 6), 2), (F(0), 3), (F(5, 12), 2)])
def test_square_identity_examples(x, beta):
    assert square_identity_check(x, beta)


def test_square_identity_worked_example():
    assert t_neg_beta(F(5, 12), 2) == F(1, 6)
    assert t_neg_beta(F(1, 6), 2) == F(2, 3)
    assert t_beta(F(5, 12), 4) == F(2, 3)


@settings(max_examples=500, deadline=None)
@given(st.integers(1, 10 ** 4), st.integers(0, 10 ** 4), st.integers(2, 9))
def test_square_identity_property(q, p, beta):
    assert square_identity_check(F(p % q, q), beta)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10 ** 4), st.integers(0, 10 ** 4), st.integers(2, 9))
def test_fractional_part_oracle(q, p, beta):
    x = F(p % q, q)
    # oracle: fractional parts via integer floor division
    bx = beta * x
    assert t_beta(x, beta) == bx - (bx.numerator // bx.denominator)
    nx = -bx
    frac = nx - (nx.numerator // nx.denominator)
    assert t_neg_beta(x, beta) == (frac if frac != 0 or x == 0 else 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 2000), st.integers(0, 2000), st.integers(2, 7))
def test_digits_follow_t_beta_branches(q, p, beta):
    x = F(p % q, q)
    pre, per = digits_of_rational(x, beta)
    digits = (pre + per * 30)[:30]
    for d in digits:
        r = math.floor(beta * x) + 1
        assert d == r - 1
        x = t_beta(x, beta)


def test_ell_examples():
    assert ell_prime(2, 4) == 3
    assert ell(2, 4) == 5
    assert ell_prime(2, 2) == 2


def test_ell_inequalities_by_hand():
    target = (1 - F(1, 2)) / 5
    assert 2 * F(1, 2 ** 5) < target <= 2 * F(1, 2 ** 4)
    assert 2 * F(1, 4 ** 3) < target <= 2 * F(1, 4 ** 2)


@pytest.mark.parametrize("beta", range(2, 12))
def test_closed_forms_agree(beta):
    for n in range(2, 40):
        assert ell(beta, n) == ell_closed_form(beta, n)
        assert ell_prime(beta, n) == ell_prime_closed_form(beta, n)
        # float oracle of the closed forms, away from exact-integer logs
        q = 2 * (n + 1) / (beta - 1)
        lg = math.log(q) / math.log(beta)
        if abs(lg - round(lg)) > 1e-9:
            assert ell(beta, n) == 1 + math.ceil(lg)
        lg2 = 0.5 + lg / 2
        if abs(lg2 - round(lg2)) > 1e-9:
            assert ell_prime(beta, n) == math.ceil(lg2)


def test_strict_ceiling_matters():
    # beta=3, n=2: Q = 3 and log_3(Q) = 1 exactly, so the ordinary ceiling is one short
    assert ell_closed_form(3, 2) == ell(3, 2) == 3
    # beta=2, n=3: Q = 8 = 2**3 hits 2m-1 = 3 exactly
    assert ell_prime_closed_form(2, 3, strict=True) == ell_prime(2, 3) == 3
    assert ell_prime_closed_form(2, 3, strict=False) == 2


def test_factor_census_examples():
    c = factor_census([0, 0, 0, 0], 2, 2)
    assert (c.count, c.missing) == (1, [(0, 1), (1, 0), (1, 1)])
    assert c.to_json()["missing"] == ["01", "10", "11"]
    c = factor_census([0, 1, 0, 1], 1, 2)
    assert (c.count, c.missing, c.complete) == (2, [], True)
    with pytest.raises(ValueError):
        factor_census([0, 1], 3, 2)
    with pytest.raises(ValueError):
        factor_census([0, 2], 1, 2)


def test_champernowne_census():
    z = champernowne_stream(4).prefix(10_000)
    assert factor_census(z, 3, 4).count == 64
    # oracle: direct substring scan of the decimal-free digit string
    text = "".join(map(str, z))
    assert all(f"{a}{b}{c}" in text for a in range(4) for b in range(4) for c in range(4))


def test_census_monotone_in_prefix():
    z = champernowne_stream(4)
    prev = None
    for length in (10, 50, 200, 1000, 4000):
        missing = set(factor_census(z.prefix(length), 4, 4).missing)
        if prev is not None:
            assert missing <= prev
        prev = missing


def test_richness_evidence_wording():
    c = champernowne_stream(4)
    assert richness_evidence(c, 3, 10_000).endswith("confirmed by prefix of length 10000")
    assert richness_evidence(c, 6, 100).endswith("not yet confirmed")
    assert "confirmed by" in richness_evidence(offset_add(c, F(1, 2)), 3, 10_000)
    assert richness_evidence(rational_stream(F(1, 3), 4), 2, 1000).endswith("not yet confirmed")


def test_beta_orbit_examples():
    r = beta_orbit(F(1, 6), 2, "plus", 10)
    assert (r.preperiod, r.cycle, r.terminated_reason) == ([F(1, 6)], [F(1, 3), F(2, 3)], "Cycle")
    r = beta_orbit(0, 2, "minus", 5)
    assert r.cycle == [0] and r.preperiod == []
    r = beta_orbit(F(1, 5), 4, "squared", 10)
    assert r.terminated_reason == "Cycle"
    assert all(p.denominator == 5 for p in r.preperiod + r.cycle)


def test_beta_orbit_bounds_and_predicate():
    r = beta_orbit(F(1, 7), 2, "plus", max_steps=1)
    assert r.terminated_reason == "BoundExceeded"
    r = beta_orbit(F(1, 6), 2, "plus", within=lambda x: x < F(1, 2))
    assert r.terminated_reason == "LeftImage" and r.points[-1] == F(2, 3)
    with pytest.raises(ValueError):
        beta_orbit(F(1, 3), 2, "sideways")


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 400), st.integers(0, 400), st.sampled_from([2, 3, 4, 5]), st.sampled_from(["plus", "minus", "squared"]))
def test_beta_orbit_cycles_map_cyclically(q, p, beta, variant):
    from pwaffine.betadyn import transformation

    x = F(p % q, q)
    r = beta_orbit(x, beta, variant)
    assert r.terminated_reason == "Cycle"
    T = transformation(beta, variant)
    cyc = r.cycle
    assert all(T(cyc[i]) == cyc[(i + 1) % len(cyc)] for i in range(len(cyc)))
    if math.gcd(q, beta) == 1:
        # denominators coprime to beta give purely periodic orbits with period <= q
        assert len(r.points) <= q + 1


def test_backward_f111(f111):
    rep = backward_equals_transform(f111, F(1, 6), 10)
    assert rep.chain == [F(1, 6), F(2, 3)]
    assert rep.status == "Dead" and rep.death_index == 2
    assert rep.transform_iterates[:3] == [F(1, 6), F(2, 3), F(2, 3)]
    assert rep.death_point == F(2, 3) and rep.death_in_gap


def test_backward_plus_form(plus_half):
    rep = backward_equals_transform(plus_half, F(1, 2), 5)
    oracle = brute_force_preimage(plus_half, F(1, 2))
    assert oracle is None
    assert rep.status == "Dead" and rep.death_index == 1 and rep.chain == [F(1, 2)]


def test_backward_cyclic_chain():
    f = build_map(2, 1, (0, F(1, 3), F(1, 2), 1), (1, 2, 1))
    rep = backward_equals_transform(f, F(1, 3))
    assert rep.status == "Cyclic"
    assert rep.chain == [F(1, 3), F(2, 3), F(1, 3)]


def test_backward_detects_broken_preimage(monkeypatch, f111):
    import pwaffine.betadyn as bd

    monkeypatch.setattr(bd, "preimage", lambda f, y: F(1, 7))
    with pytest.raises(CorrespondenceMismatch):
        backward_equals_transform(f111, F(1, 6))


def test_backward_requires_theorem_form():
    from pwaffine.contraction import from_intercepts

    g = from_intercepts(2, 1, (0, F(1, 2), 1), (F(1, 10), F(1, 3)))
    with pytest.raises(ValueError):
        backward_equals_transform(g, F(1, 2))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_backward_correspondence_random(seed):
    f = random_theorem_map(random.Random(seed))
    gaps = image_components(f).gaps
    for x in f.breakpoints[1:-1]:
        rep = backward_equals_transform(f, x)
        assert rep.status in ("Dead", "Cyclic")
        for a, b in zip(rep.chain, rep.chain[1:]):
            assert f(b) == a
        if rep.status == "Dead":
            assert any(rep.death_point in g for g in gaps)
