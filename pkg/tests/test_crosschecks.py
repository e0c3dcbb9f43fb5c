from fractions import Fraction

import pytest

from troptheta.crosschecks import (
    CheckOutcome,
    sample_points,
    sample_shifts,
    seeded_period,
    suite_a,
    suite_b,
    suite_c,
)
from troptheta.linalg import identity, is_symmetric
from troptheta.nonarch import (
    CocycleMismatchError,
    PeriodMatrix,
    build_riemann_theta,
    canonical_cocycle,
    construct_rational_function,
    theta_basis,
)
from troptheta.puiseux import PuiseuxNumber
from troptheta.theta import NotPrincipalError

F = Fraction
Q = PuiseuxNumber.parse

PM1 = PeriodMatrix(((Q("q^(2)"),),))
PM2 = PeriodMatrix(((Q("q^(2)"), Q("q")), (Q("q"), Q("q^(2)"))))


def level2_pair():
    cocycle = canonical_cocycle(PM1, ((2,),))
    return theta_basis(PM1, cocycle)


def fixtures_for_suite_a():
    out = [
        build_riemann_theta(PM1, ((1,),)),
        build_riemann_theta(PM2, ((1, 0), (0, 1))),
        build_riemann_theta(seeded_period(3, 11), identity(3)),
    ]
    out.extend(level2_pair())
    return out


def test_suite_a_holds_on_principal_and_level_two_series():
    for f in fixtures_for_suite_a():
        outcomes = suite_a(f)
        assert len(outcomes) == 1
        assert outcomes[0].name == "transformation-law"
        assert outcomes[0].passed, outcomes[0].detail
        assert outcomes[0].detail == "350 exact identities"


def test_suite_b_standard_periods_match_exactly():
    for pm in (PM1, PM2):
        outcomes = suite_b(pm)
        assert [o.name for o in outcomes] == ["riemann-match", "even-valuations"]
        assert all(o.passed for o in outcomes), outcomes
        assert outcomes[0].detail.startswith("100/100")


def test_suite_b_seeded_periods():
    for g, seed in ((1, 3), (2, 5), (3, 9)):
        outcomes = suite_b(seeded_period(g, seed), samples=40, seed=seed)
        assert all(o.passed for o in outcomes), (g, seed, outcomes)


def test_suite_b_requires_a_principal_polarization():
    with pytest.raises(NotPrincipalError):
        suite_b(PM1, ((2,),))


def test_suite_c_level_two_basis_pair():
    f1, f2 = level2_pair()
    outcomes = suite_c(f1, f2)
    assert [o.name for o in outcomes] == [
        "difference-periodic",
        "valuation-identity",
    ]
    assert all(o.passed for o in outcomes), outcomes


def test_suite_c_difference_is_not_constant():
    f1, f2 = level2_pair()
    ht = construct_rational_function(f1, f2).h_trop
    values = {ht((F(k, 7),)) for k in range(-6, 7)}
    assert len(values) >= 2


def test_suite_c_rejects_mismatched_cocycles():
    f1, _ = level2_pair()
    other = build_riemann_theta(PM1, ((1,),))
    with pytest.raises(CocycleMismatchError):
        suite_c(f1, other)


def test_sample_points_are_seed_deterministic():
    a = sample_points(2, 6, 42)
    assert a == sample_points(2, 6, 42)
    assert a != sample_points(2, 6, 43)
    for p in a:
        assert {x.denominator for x in p} <= {1, 7, 11, 13}


def test_sample_shifts_are_nonzero():
    for n in sample_shifts(3, 25, 0):
        assert any(n)


def test_seeded_period_is_symmetric_and_deterministic():
    pm = seeded_period(3, 11)
    rows = pm.exponent_rows()
    assert is_symmetric(rows)
    assert pm == seeded_period(3, 11)
    assert pm != seeded_period(3, 12)


def test_check_outcome_serialization():
    o = CheckOutcome(name="x", passed=True, detail="42/42")
    assert o.to_json_dict() == {"name": "x", "passed": True, "detail": "42/42"}
