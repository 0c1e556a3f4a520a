"""Shared scenario builders for the test suite."""

from beacon_forge.core import (
    Alphabet,
    BeaconSpec,
    Combiner,
    Scenario,
    ValidatedScenario,
    validate_scenario,
)


def build_scenario(
    honesties,
    size=2,
    length=8,
    combiner=Combiner.XOR,
    seed=7,
    hash_spec=None,
    positions=None,
    phases=None,
    strategies=None,
) -> ValidatedScenario:
    n = len(honesties)
    positions = positions if positions is not None else [1000.0 * i for i in range(n)]
    phases = phases if phases is not None else [0.0] * n
    strategies = strategies if strategies is not None else [None] * n
    beacons = tuple(
        BeaconSpec(
            id=i,
            position=positions[i],
            phase_offset=phases[i],
            period=1.0,
            honesty=honesties[i],
            strategy=strategies[i],
        )
        for i in range(n)
    )
    raw = Scenario(
        alphabet=Alphabet(size),
        beacons=beacons,
        length=length,
        combiner=combiner,
        master_seed=seed,
        hash_spec=hash_spec,
    )
    return validate_scenario(raw)


def spacelike_scenario(honesties, **kwargs) -> ValidatedScenario:
    """Same-phase beacons far apart: every same-index pair is spacelike."""
    return build_scenario(honesties, **kwargs)


def timelike_scenario(honesties, late=None, **kwargs) -> ValidatedScenario:
    """Co-located beacons; the `late` one has every other in its past cone."""
    n = len(honesties)
    late = n - 1 if late is None else late
    phases = [0.05 * i for i in range(n)]
    phases[late] = 0.9
    return build_scenario(honesties, positions=[0.0] * n, phases=phases, **kwargs)
