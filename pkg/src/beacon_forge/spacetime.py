"""Special-relativistic causality layer in one spatial dimension, c = 1.

Interval classification, light-cone membership, signal availability times,
and the two observer-region queries used throughout: can the public compute
the combined digit, and is an observer in the accomplice-only gap where the
combined digit is known to conspirators but not yet computable publicly.

Cone membership is closed: the lightlike boundary counts as inside, since
signals travelling at exactly c do arrive. Classification compares the
interval discriminant against a small absolute tolerance so user-chosen real
coordinates near the boundary classify as lightlike instead of flapping on
rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Set

from .errors import IndexOutOfRange, InvalidSpeed, NoDishonestBeacons

if TYPE_CHECKING:  # pragma: no cover
    from .core import DigitRecord, ValidatedScenario

SPEED_OF_LIGHT = 1.0
LIGHTLIKE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SpacetimeEvent:
    """A (position, time) pair in the single global frame."""

    position: float
    time: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.position) and math.isfinite(self.time)):
            raise ValueError("event coordinates must be finite")


class IntervalKind(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def classify_interval(
    e1: SpacetimeEvent, e2: SpacetimeEvent, eps: float = LIGHTLIKE_TOLERANCE
) -> IntervalKind:
    """Sign of (c dt)^2 - dx^2: negative spacelike, positive timelike, zero lightlike."""
    dt = SPEED_OF_LIGHT * (e2.time - e1.time)
    dx = e2.position - e1.position
    discriminant = dt * dt - dx * dx
    if abs(discriminant) <= eps:
        return IntervalKind.LIGHTLIKE
    return IntervalKind.TIMELIKE if discriminant > 0 else IntervalKind.SPACELIKE


def in_forward_cone(
    source: SpacetimeEvent, target: SpacetimeEvent, eps: float = LIGHTLIKE_TOLERANCE
) -> bool:
    """True iff target lies in or on the forward light cone of source."""
    if target.time < source.time:
        return False
    return classify_interval(source, target, eps) is not IntervalKind.SPACELIKE


def availability_time(
    emission: SpacetimeEvent, observer_position: float, v: float = SPEED_OF_LIGHT
) -> float:
    """Earliest time the emitted digit is knowable at observer_position.

    v is the signal propagation speed, 0 < v <= c.
    """
    if not (0 < v <= SPEED_OF_LIGHT):
        raise InvalidSpeed(f"propagation speed must be in (0, {SPEED_OF_LIGHT}], got {v}")
    return emission.time + abs(observer_position - emission.position) / v


def past_cone_digits(
    ledger: Iterable["DigitRecord"],
    observer: SpacetimeEvent,
    eps: float = LIGHTLIKE_TOLERANCE,
) -> Set["DigitRecord"]:
    """Records whose emission lies in or on the observer's past light cone."""
    return {rec for rec in ledger if in_forward_cone(rec.event, observer, eps)}


def all_pairs_spacelike(scenario: "ValidatedScenario", eps: float = LIGHTLIKE_TOLERANCE) -> bool:
    """True iff every pair of distinct beacons is spacelike separated at every index."""
    n = scenario.beacon_count
    for i in range(scenario.length):
        for a in range(n):
            ea = scenario.emission_event(a, i)
            for b in range(a + 1, n):
                if classify_interval(ea, scenario.emission_event(b, i), eps) is not IntervalKind.SPACELIKE:
                    return False
    return True


def can_compute_resultant(
    scenario: "ValidatedScenario",
    observer: SpacetimeEvent,
    index: int,
    eps: float = LIGHTLIKE_TOLERANCE,
) -> bool:
    """True iff the observer is inside every beacon's forward cone for this index."""
    if not 0 <= index < scenario.length:
        raise IndexOutOfRange(f"index {index} outside [0, {scenario.length})")
    return all(
        in_forward_cone(scenario.emission_event(b, index), observer, eps)
        for b in range(scenario.beacon_count)
    )


def in_predictability_gap(
    scenario: "ValidatedScenario",
    observer: SpacetimeEvent,
    index: int,
    eps: float = LIGHTLIKE_TOLERANCE,
) -> bool:
    """True iff accomplices know the combined digit here but the public cannot.

    The gap is the region inside the forward cone of every honest beacon yet
    outside the forward cone of at least one dishonest beacon.
    """
    if not 0 <= index < scenario.length:
        raise IndexOutOfRange(f"index {index} outside [0, {scenario.length})")
    dishonest = scenario.dishonest_indices
    if not dishonest:
        raise NoDishonestBeacons("predictability gap is empty without a dishonest beacon")
    for b in scenario.honest_indices:
        if not in_forward_cone(scenario.emission_event(b, index), observer, eps):
            return False
    return any(
        not in_forward_cone(scenario.emission_event(b, index), observer, eps) for b in dishonest
    )
