"""Worked settings: second-price thresholds, k-minded bidders, facilities on a line.

Each application reduces to the core harmless/harmful machinery after a
change of coordinates, and the reductions here are deliberately thin: the
point is that the generic sets, specialised, reproduce the verification
requirements these settings are known to need.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import Vector, frac
from .harmless import deterministic_harmless, pairwise_harmless
from .mechanisms import MechanismError, point_mass, point_masses


class VerificationKind(Enum):
    """Partial verification technologies used by the applications."""

    NO_OVERBID = "no_overbid"
    NO_OVERBID_ON_RECEIVED = "no_overbid_on_received"
    NO_UNDERBID_DISTANCE = "no_underbid_distance"
    DIRECTION_IMPOSING = "direction_imposing"


def second_price_harmful_contains(
    reported_value,
    threshold,
    allocation_dependent: bool,
    candidate_value,
) -> bool:
    """Which true values a single observed bid could have helped.

    Allocation-dependent verification only fires when the item changes
    hands: against the specific threshold (the best competing bid), the
    report helps exactly the true values that would have lost on their own,
    provided the report actually wins.  Without allocation dependence the
    threshold is unknown, so the harmful set unions over every threshold the
    report can beat: all true values strictly under the report.

    Zero-value candidates gain nothing from winning, so they are never
    harmful.
    """
    reported = frac(reported_value)
    candidate = frac(candidate_value)
    threshold = frac(threshold)
    if reported < 0 or candidate < 0:
        raise MechanismError("second-price values are nonnegative")
    if allocation_dependent:
        if threshold > reported:
            return False
        return 0 < candidate < threshold
    return 0 < candidate < reported


def kminded_harmless_contains(k: int, theta: Vector, x: Vector) -> bool:
    """Harmlessness for a bidder interested in k bundles (plus the null).

    Types live on (null, bundle_1, ..., bundle_k) with the null coordinate
    pinned to zero.  k = 1 reduces to the two-allocation set -- underbids
    are harmless, overbids are not; k = 2 is the deterministic set over the
    three point masses.
    """
    if k not in (1, 2):
        raise MechanismError(f"k must be 1 or 2, got {k}")
    if theta.dim != k + 1 or x.dim != k + 1:
        raise MechanismError(f"types need {k + 1} coordinates (null first)")
    if theta[0] != 0 or x[0] != 0:
        raise MechanismError("the null coordinate (index 0) must be worth 0")
    if k == 1:
        return pairwise_harmless(theta, point_mass(0, 2), point_mass(1, 2)).contains(x)
    return deterministic_harmless(theta, point_masses(3)).contains(x)


@dataclass(frozen=True)
class FacilityLine:
    """Two facility locations on a line and the benefit of being served."""

    locations: tuple[Fraction, Fraction]
    benefit: Fraction

    def __post_init__(self) -> None:
        locations = tuple(frac(g) for g in self.locations)
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "benefit", frac(self.benefit))
        if len(locations) != 2:
            raise MechanismError("exactly two facility locations are supported")
        if not locations[0] < locations[1]:
            raise MechanismError("facility locations must be distinct and sorted")

    @property
    def span(self) -> Fraction:
        return self.locations[1] - self.locations[0]


def facility_type(agent_position, line: FacilityLine) -> Vector:
    """Induced type: benefit minus distance, per facility."""
    z = frac(agent_position)
    return Vector(tuple(line.benefit - abs(z - g) for g in line.locations))


def distance_verification_blocks(
    kind: VerificationKind,
    agent_position,
    misreport_position,
    facility,
) -> bool:
    """Would the verification, applied at the given facility, catch the lie?"""
    z = frac(agent_position)
    reported = frac(misreport_position)
    g = frac(facility)
    if kind is VerificationKind.NO_UNDERBID_DISTANCE:
        return abs(reported - g) < abs(z - g)
    if kind is VerificationKind.DIRECTION_IMPOSING:
        return (reported - g) * (z - g) < 0
    raise MechanismError(f"{kind.value} does not apply to positions on a line")


def facility_preferred(agent_position, line: FacilityLine) -> Fraction | None:
    """The nearer facility, or None when the agent is exactly between."""
    z = frac(agent_position)
    left, right = line.locations
    if abs(z - left) == abs(z - right):
        return None
    return right if abs(z - right) < abs(z - left) else left


def facility_harmless_position(agent_position, line: FacilityLine, misreport_position) -> bool:
    """Is reporting the given position harmless for the agent?

    Fixed-tie-breaking convention: a misreport is harmless when its induced
    type is weakly less keen on the agent's preferred facility, boundary
    included.  Indifferent agents find every report harmless.
    """
    z = frac(agent_position)
    reported = frac(misreport_position)
    preferred = facility_preferred(z, line)
    if preferred is None:
        return True
    left, right = line.locations
    other = left if preferred == right else right

    def keenness_for_other(position: Fraction) -> Fraction:
        return abs(position - preferred) - abs(position - other)

    return keenness_for_other(reported) >= keenness_for_other(z)


def facility_first_uncovered(
    agent_position,
    line: FacilityLine,
    verifications: Iterable[VerificationKind],
    probe_step: Fraction | None = None,
    span_multiplier: int = 3,
    extra_probes: Sequence[Fraction] = (),
    exempt_when_preferred: bool = False,
) -> Fraction | None:
    """Smallest probed position that could help the agent yet evades every
    verification, or None when the verifications cover all probes.

    Positions are probed on a grid (default: multiples of span/100 within
    ``span_multiplier`` spans of the agent) plus the exact breakpoints: both
    facilities, the agent, and the midpoint.  A misreport can only help by
    stealing the agent's preferred facility, so each verification is applied
    there.  Harmlessness uses the fixed-tie-breaking convention: positions
    whose induced type sits on the same boundary as the agent's receive the
    same allocation and cannot benefit, which closes the half-space and, for
    agents outside both facilities, makes every report harmless.

    ``exempt_when_preferred`` weakens each verification to fire only when
    the agent would not already receive her preferred facility.  A
    beneficial misreport always hands the agent her preferred facility from
    a rule that would not have granted it truthfully, so the weakening never
    changes coverage; the flag is accepted for fidelity to the weaker
    technology.
    """
    z = frac(agent_position)
    kinds = tuple(verifications)
    for kind in kinds:
        if kind not in (
            VerificationKind.NO_UNDERBID_DISTANCE,
            VerificationKind.DIRECTION_IMPOSING,
        ):
            raise MechanismError(f"{kind.value} is not a positional verification")
    step = frac(probe_step) if probe_step is not None else line.span / 100
    if step <= 0:
        raise MechanismError("probe step must be positive")
    preferred = facility_preferred(z, line)
    if preferred is None:
        # Indifferent agents cannot be helped: everything is harmless.
        return None

    def blocked(position: Fraction) -> bool:
        # In every harmful scenario the agent is not already receiving her
        # preferred facility, so the exempt_when_preferred weakening is
        # inactive here by construction.
        return any(
            distance_verification_blocks(kind, z, position, preferred)
            for kind in kinds
        )

    left, right = line.locations
    window = line.span * span_multiplier
    start = z - window
    stop = z + window
    first = -(-start // step)  # ceil division on Fractions
    last = stop // step
    probes = {step * k for k in range(int(first), int(last) + 1)}
    probes.update((left, right, z, (left + right) / 2))
    probes.update(frac(p) for p in extra_probes)

    for position in sorted(probes):
        if position == z:
            continue
        if not facility_harmless_position(z, line, position) and not blocked(position):
            return position
    return None


def facility_verification_covers(
    agent_position,
    line: FacilityLine,
    verifications: Iterable[VerificationKind],
    probe_step: Fraction | None = None,
    span_multiplier: int = 3,
    extra_probes: Sequence[Fraction] = (),
    exempt_when_preferred: bool = False,
) -> bool:
    """Do the verifications block every misreported position that could help?

    Thin wrapper over facility_first_uncovered; see there for probe grid and
    tie-breaking conventions.
    """
    uncovered = facility_first_uncovered(
        agent_position,
        line,
        verifications,
        probe_step=probe_step,
        span_multiplier=span_multiplier,
        extra_probes=extra_probes,
        exempt_when_preferred=exempt_when_preferred,
    )
    return uncovered is None
