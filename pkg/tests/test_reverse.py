"""Harmful sets, the designer's ex-post view of an observed report.

A candidate true type is harmful for a report under a rule when the report's
allocation beats the candidate's own, valued by the candidate. Union
membership over the whole two-allocation family must match the forward
harmless set of the candidate by symmetry of the benefit relation.
"""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mechverify.geometry import region_contains, vec
from mechverify.harmless import deterministic_harmless
from mechverify.mechanisms import (
    MechanismError,
    SeparatingRule,
    TaxationRule,
    TieSide,
    point_masses,
)
from mechverify.reverse import (
    harmful_intersection_contains,
    harmful_single_contains,
    harmful_union_contains,
    pairwise_harmful_cases,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=8)


def vectors(dim):
    return st.lists(rationals, min_size=dim, max_size=dim).map(lambda cs: vec(*cs))


def separating_rules():
    a1, a2 = point_masses(2)
    return st.builds(
        SeparatingRule,
        st.just(a1),
        st.just(a2),
        rationals,
        st.sampled_from((TieSide.TO_I, TieSide.TO_J)),
    )


def test_harmful_single_direct_cases():
    a1, a2 = point_masses(2)
    rule = SeparatingRule(a1, a2, Fraction(1))
    reported = vec(3, 1)  # scores above the threshold, receives a1
    # A candidate who prefers a1 but scores below the threshold gains.
    assert harmful_single_contains(reported, rule, vec("3/2", 1))
    # A candidate already receiving a1 gains nothing.
    assert not harmful_single_contains(reported, rule, vec(4, 1))
    # A candidate preferring a2 loses by taking a1.
    assert not harmful_single_contains(reported, rule, vec(0, 1))
    # Indifferent candidates cannot strictly gain.
    assert not harmful_single_contains(reported, rule, vec(2, 2))


def test_harmful_single_taxation_rule():
    menu = TaxationRule(
        tuple(zip(point_masses(3), (Fraction(0), Fraction(1), Fraction(2))))
    )
    reported = vec(0, 0, 5)  # buys the expensive entry
    # This candidate would only buy the middle entry on its own, yet values
    # the expensive item more, so the report's purchase beats its own.
    assert harmful_single_contains(reported, menu, vec(0, 2, Fraction(5, 2)))
    # Buys the expensive entry itself: nothing to gain.
    assert not harmful_single_contains(reported, menu, vec(0, 2, Fraction(7, 2)))
    # Values the expensive item below its own purchase: the report hurts.
    assert not harmful_single_contains(reported, menu, vec(0, 2, 1))


@given(vectors(2), vectors(2))
def test_union_is_dual_to_forward_harmless_dim2(reported, candidate):
    assert harmful_union_contains(reported, point_masses(2), candidate) == (
        not deterministic_harmless(candidate, point_masses(2)).contains(reported)
    )


@given(vectors(3), vectors(3))
def test_union_is_dual_to_forward_harmless_dim3(reported, candidate):
    assert harmful_union_contains(reported, point_masses(3), candidate) == (
        not deterministic_harmless(candidate, point_masses(3)).contains(reported)
    )


def test_intersection_requires_explicit_rules():
    with pytest.raises(MechanismError):
        harmful_intersection_contains(vec(1, 0), (), vec(0, 1))


@given(vectors(2), vectors(2), st.lists(separating_rules(), min_size=1, max_size=4))
def test_intersection_implies_union(reported, candidate, rules):
    if harmful_intersection_contains(reported, rules, candidate):
        assert harmful_union_contains(reported, point_masses(2), candidate)


def test_intersection_two_rules():
    a1, a2 = point_masses(2)
    low = SeparatingRule(a1, a2, Fraction(1))
    high = SeparatingRule(a1, a2, Fraction(2))
    reported = vec(4, 0)  # above both thresholds
    between = vec(Fraction(5, 2), 1)  # above low only
    below = vec(Fraction(3, 2), 1)  # below both
    assert harmful_intersection_contains(reported, (low, high), below)
    assert not harmful_intersection_contains(reported, (low, high), between)
    assert harmful_intersection_contains(reported, (high,), between)


def test_pairwise_harmful_case1_region():
    a1, a2 = point_masses(2)
    rule = SeparatingRule(a1, a2, Fraction(1))
    case, region = pairwise_harmful_cases(vec(3, 1), rule)
    assert case == 1
    # Candidates preferring a1 whom the rule hands a2.
    assert region_contains(region, vec(Fraction(3, 2), 1))
    assert not region_contains(region, vec(4, 1))  # receives a1 itself
    assert not region_contains(region, vec(0, 1))  # prefers a2
    assert not region_contains(region, vec(2, 1))  # boundary tie goes to a1


def test_pairwise_harmful_case3_includes_tie_boundary():
    a1, a2 = point_masses(2)
    rule = SeparatingRule(a1, a2, Fraction(-1))
    case, region = pairwise_harmful_cases(vec(0, 2), rule)
    assert case == 3
    assert region_contains(region, vec(1, Fraction(3, 2)))
    # On the threshold the tie sends this candidate to a1, away from the a2
    # it strictly prefers, so the boundary belongs to the harmful set.
    assert region_contains(region, vec(0, 1))
    assert not region_contains(region, vec(0, 3))  # receives a2 itself


def test_pairwise_harmful_empty_cases():
    a1, a2 = point_masses(2)
    rule = SeparatingRule(a1, a2, Fraction(-1))
    # Receives a1 on the tie while preferring a2: the mismatch case is empty.
    case, region = pairwise_harmful_cases(vec(0, 1), rule)
    assert case == 4
    for probe in (vec(0, 0), vec(1, 0), vec(-3, 5)):
        assert not region_contains(region, probe)


@given(vectors(2), separating_rules(), vectors(2))
def test_pairwise_region_matches_predicate(reported, rule, candidate):
    # For override-free two-allocation rules the convex case region is the
    # exact harmful set.
    _, region = pairwise_harmful_cases(reported, rule)
    assert region_contains(region, candidate) == harmful_single_contains(
        reported, rule, candidate
    )
