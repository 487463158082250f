"""Search oracles and witness constructions for non-harmless reports.

Every witness returned by an oracle must survive direct re-evaluation: the
rule it names, applied to the truthful and the misreported type, must hand
the truthful type strictly more value under the misreport.
"""

from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mechverify.geometry import vec
from mechverify.harmless import (
    SimplexFamily,
    deterministic_harmless,
    tie_harmless_contains,
)
from mechverify.mechanisms import MechanismError, allocate_separating, point_masses
from mechverify.multiagent import PriceFamily
from mechverify.oracle import (
    construct_tie_witness,
    grid_harmless,
    rule_benefit,
    search_beneficial_misreport,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=8)


def vectors(dim):
    return st.lists(rationals, min_size=dim, max_size=dim).map(lambda cs: vec(*cs))


def assert_tie_witness_valid(witness, theta, x):
    gained, truthful = rule_benefit(witness.rule, theta, x)
    assert gained == witness.gained_value
    assert truthful == witness.truthful_value
    assert gained > truthful
    assert allocate_separating(witness.rule, x) == witness.high
    assert allocate_separating(witness.rule, theta) == witness.low


@given(vectors(2), vectors(2))
def test_search_agrees_with_deterministic_membership_dim2(theta, x):
    rule = search_beneficial_misreport(theta, x, point_masses(2))
    member = deterministic_harmless(theta, point_masses(2)).contains(x)
    assert (rule is None) == member


@given(vectors(3), vectors(3))
def test_search_agrees_with_deterministic_membership_dim3(theta, x):
    rule = search_beneficial_misreport(theta, x, point_masses(3))
    member = deterministic_harmless(theta, point_masses(3)).contains(x)
    assert (rule is None) == member


@given(vectors(3), vectors(3))
def test_search_witness_yields_strict_benefit(theta, x):
    allocations = point_masses(3)
    rule = search_beneficial_misreport(theta, x, allocations)
    assume(rule is not None)
    gained, truthful = rule_benefit(rule, theta, x)
    assert gained > truthful
    assert rule.a_i in allocations
    assert rule.a_j in allocations


def test_search_guards():
    theta = vec(1, 3)
    assert search_beneficial_misreport(theta, theta, point_masses(2)) is None
    with pytest.raises(MechanismError):
        search_beneficial_misreport(theta, vec(0, 1), point_masses(2)[:1])
    with pytest.raises(MechanismError):
        search_beneficial_misreport(theta, vec(0, 1, 2), point_masses(2))


def test_search_finds_boundary_overreport():
    # Equal value gap, different report: the critical rule with the boundary
    # tie broken against truth is the witness.
    theta = vec(1, 3)
    x = vec(0, 2)
    rule = search_beneficial_misreport(theta, x, point_masses(2))
    assert rule is not None
    gained, truthful = rule_benefit(rule, theta, x)
    assert gained == 3
    assert truthful == 1


@given(vectors(3), vectors(3))
def test_tie_witness_none_iff_member_full_simplex(theta, x):
    witness = construct_tie_witness(theta, x, SimplexFamily.FULL_SIMPLEX)
    member = tie_harmless_contains(theta, x, SimplexFamily.FULL_SIMPLEX)
    assert (witness is None) == member
    if witness is not None:
        assert_tie_witness_valid(witness, theta, x)


def test_tie_witness_pure_upscale():
    theta = vec(1, 2, 4)
    witness = construct_tie_witness(
        theta, theta.scale(Fraction(3, 2)), SimplexFamily.FULL_SIMPLEX
    )
    assert witness is not None
    assert_tie_witness_valid(witness, theta, theta.scale(Fraction(3, 2)))


def test_tie_witness_residual_direction():
    # (1,2,5) leaves the ray through theta, so the witness must tilt toward
    # theta's projection rather than merely thresholding the scale.
    theta = vec(1, 2, 4)
    x = vec(1, 2, 5)
    witness = construct_tie_witness(theta, x, SimplexFamily.FULL_SIMPLEX)
    assert witness is not None
    assert_tie_witness_valid(witness, theta, x)


def test_tie_witness_subsimplex_paths():
    theta = vec(0, 1, 2)
    upscaled = theta.scale(2)
    witness = construct_tie_witness(theta, upscaled, SimplexFamily.SUBSIMPLEX_WITH_NULL)
    assert witness is not None
    assert_tie_witness_valid(witness, theta, upscaled)

    sideways = vec(0, 2, 1)
    witness = construct_tie_witness(theta, sideways, SimplexFamily.SUBSIMPLEX_WITH_NULL)
    assert witness is not None
    assert_tie_witness_valid(witness, theta, sideways)

    assert construct_tie_witness(theta, theta.scale(Fraction(1, 2)),
                                 SimplexFamily.SUBSIMPLEX_WITH_NULL) is None


def test_tie_witness_indifferent_type_has_none():
    # A type valuing every outcome equally cannot be hurt or helped.
    theta = vec(2, 2, 2)
    for x in (vec(0, 1, 5), vec(-1, 0, 0), theta):
        assert construct_tie_witness(theta, x, SimplexFamily.FULL_SIMPLEX) is None


@given(vectors(2), vectors(2))
def test_grid_matches_deterministic_for_point_masses(theta, x):
    # The grid always includes each pair's exact critical rule, so for a
    # finite allocation set the scan is complete, not just sound.
    assert grid_harmless(theta, x, point_masses(2)) == deterministic_harmless(
        theta, point_masses(2)
    ).contains(x)


@given(vectors(3), vectors(3))
def test_grid_refinement_never_flips_false_to_true(theta, x):
    coarse = grid_harmless(theta, x, point_masses(3), Fraction(1, 4))
    fine = grid_harmless(theta, x, point_masses(3), Fraction(1, 8))
    if not coarse:
        assert not fine


def test_grid_rejects_bad_resolution():
    with pytest.raises(MechanismError):
        grid_harmless(vec(1, 2), vec(0, 1), point_masses(2), Fraction(0))


def test_grid_handles_price_family():
    family = PriceFamily(((Fraction(0), Fraction(2)), (Fraction(0), Fraction(2))))
    theta = vec(0, 1, 2)
    # Strictly understating every value gap is safe; matching a gap exactly
    # is not, because a menu priced at the gap can break the tie against
    # truth.
    assert grid_harmless(theta, vec(0, Fraction(1, 2), 1), family, Fraction(1, 8))
    assert not grid_harmless(theta, vec(0, 1, 1), family, Fraction(1, 8))
    assert not grid_harmless(theta, vec(0, 1, 3), family, Fraction(1, 8))
