"""Core domain types: alphabets, beacon specs, scenarios, and validation.

A Scenario is a complete experiment description: the alphabet, the beacons
with their spacetime schedules and honesty labels, the combiner protocol,
and one 64-bit master seed from which every stream in the run is derived.
validate_scenario checks all invariants and precomputes the emission event
table; downstream modules only accept the ValidatedScenario it returns.

The on-disk format is a single JSON document (see scenario_from_dict for the
exact schema). Unknown keys are rejected anywhere in the document.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from .errors import (
    AlphabetTooSmall,
    EmptyBeaconSet,
    HashNeedsPowerOfTwo,
    NonPositivePeriod,
    ScenarioFormatError,
)
from .spacetime import SPEED_OF_LIGHT, SpacetimeEvent

DEFAULT_CAPTURE_LENGTH = 256
DEFAULT_RESEED_LENGTH = 200
DEFAULT_MARKER_BITS = 40
DEFAULT_HASH_ALGORITHM = "sha256"


@dataclass(frozen=True)
class Alphabet:
    """An alphabet of `size` letters; size must be at least 2."""

    size: int

    def __post_init__(self) -> None:
        if not isinstance(self.size, int) or isinstance(self.size, bool) or self.size < 2:
            raise AlphabetTooSmall(f"alphabet needs at least 2 letters, got {self.size!r}")

    @property
    def bit_width(self) -> Optional[int]:
        """Bits per letter when size is a power of two, else None."""
        if self.size & (self.size - 1) == 0:
            return self.size.bit_length() - 1
        return None


class Honesty(Enum):
    HONEST = "honest"
    SABOTAGED_PSRG = "sabotaged_psrg"
    ADAPTIVE_COLLUDER = "adaptive_colluder"


class Combiner(Enum):
    XOR = "xor"
    TIME_SHARING = "time_sharing"
    HASH = "hash"


@dataclass(frozen=True)
class SabotageParams:
    """Configuration of a seed-capturing pseudorandom saboteur.

    The beacon emits its first capture_length digits from the true-random
    source, then continues pseudorandomly keyed by that prefix. Whenever the
    trailing bits of its output equal `marker` it emits reseed_length fresh
    true-random digits and rekeys from them. marker is a '0'/'1' string; when
    None, a 40-bit marker is derived from the run's master seed.
    """

    capture_length: int = DEFAULT_CAPTURE_LENGTH
    reseed_length: int = DEFAULT_RESEED_LENGTH
    marker: Optional[str] = None


@dataclass(frozen=True)
class AdaptiveParams:
    """Configuration of a colluding beacon that forces the XOR resultant.

    target_sequence lists the digits the conspiracy wants the combined stream
    to take; when None, a target stream is derived from the master seed.
    """

    target_sequence: Optional[tuple[int, ...]] = None


StrategyParams = Union[SabotageParams, AdaptiveParams, None]


@dataclass(frozen=True)
class BeaconSpec:
    """One beacon: schedule, 1-D position, honesty label, strategy parameters."""

    id: int
    position: float
    phase_offset: float
    period: float
    honesty: Honesty
    strategy: StrategyParams = None


@dataclass(frozen=True)
class HashSpec:
    """Parameters of the hash combiner: named digest and output truncation width."""

    algorithm: str = DEFAULT_HASH_ALGORITHM
    output_bits: int = 8

    def digest_bits(self) -> int:
        return hashlib.new(self.algorithm).digest_size * 8


@dataclass(frozen=True)
class DigitRecord:
    """One emitted digit: beacon index, stream index, value, emission event."""

    beacon: int
    stream_index: int
    digit: int
    event: SpacetimeEvent


@dataclass(frozen=True)
class Scenario:
    """Raw experiment description, prior to validation."""

    alphabet: Alphabet
    beacons: tuple[BeaconSpec, ...]
    length: int
    combiner: Combiner
    master_seed: int
    hash_spec: Optional[HashSpec] = None
    signal_speed: float = SPEED_OF_LIGHT


@dataclass(frozen=True)
class ValidatedScenario:
    """A scenario with all invariants checked and emission events precomputed."""

    scenario: Scenario
    emission_events: tuple[tuple[SpacetimeEvent, ...], ...] = field(repr=False)

    @property
    def alphabet(self) -> Alphabet:
        return self.scenario.alphabet

    @property
    def beacons(self) -> tuple[BeaconSpec, ...]:
        return self.scenario.beacons

    @property
    def length(self) -> int:
        return self.scenario.length

    @property
    def combiner(self) -> Combiner:
        return self.scenario.combiner

    @property
    def hash_spec(self) -> Optional[HashSpec]:
        return self.scenario.hash_spec

    @property
    def master_seed(self) -> int:
        return self.scenario.master_seed

    @property
    def beacon_count(self) -> int:
        return len(self.scenario.beacons)

    @property
    def honest_indices(self) -> tuple[int, ...]:
        return tuple(b.id for b in self.beacons if b.honesty is Honesty.HONEST)

    @property
    def dishonest_indices(self) -> tuple[int, ...]:
        return tuple(b.id for b in self.beacons if b.honesty is not Honesty.HONEST)

    def emission_event(self, beacon: int, index: int) -> SpacetimeEvent:
        return self.emission_events[beacon][index]


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


def validate_scenario(raw: Scenario) -> ValidatedScenario:
    """Check every scenario invariant and precompute the emission event table."""
    if not raw.beacons:
        raise EmptyBeaconSet("scenario declares no beacons")
    if raw.alphabet.size < 2:
        raise AlphabetTooSmall(f"alphabet needs at least 2 letters, got {raw.alphabet.size}")
    if not isinstance(raw.length, int) or raw.length < 1:
        raise ScenarioFormatError(f"length must be a positive integer, got {raw.length!r}")
    if not isinstance(raw.master_seed, int) or not 0 <= raw.master_seed < 2**64:
        raise ScenarioFormatError("master_seed must be an unsigned 64-bit integer")
    if raw.signal_speed != SPEED_OF_LIGHT:
        raise ScenarioFormatError("signal_speed is fixed at c = 1")

    for pos, spec in enumerate(raw.beacons):
        if spec.id != pos:
            raise ScenarioFormatError(f"beacon ids must be 0..n-1 in order, got {spec.id} at {pos}")
        if not spec.period > 0:
            raise NonPositivePeriod(f"beacon {pos} has period {spec.period}")
        _check_strategy(spec, raw)

    hash_spec = raw.hash_spec
    if raw.combiner is Combiner.HASH:
        width = raw.alphabet.bit_width
        if width is None:
            raise HashNeedsPowerOfTwo(
                f"hash combiner requires a power-of-two alphabet, got {raw.alphabet.size}"
            )
        if hash_spec is None:
            hash_spec = HashSpec(output_bits=width)
        _check_hash_spec(hash_spec, width)
    elif hash_spec is not None:
        raise ScenarioFormatError("hash_spec is only allowed with the hash combiner")

    scenario = Scenario(
        alphabet=raw.alphabet,
        beacons=raw.beacons,
        length=raw.length,
        combiner=raw.combiner,
        master_seed=raw.master_seed,
        hash_spec=hash_spec,
        signal_speed=raw.signal_speed,
    )
    events = tuple(
        tuple(
            SpacetimeEvent(spec.position, spec.phase_offset + i * spec.period)
            for i in range(raw.length)
        )
        for spec in raw.beacons
    )
    return ValidatedScenario(scenario=scenario, emission_events=events)


def _check_strategy(spec: BeaconSpec, raw: Scenario) -> None:
    if spec.honesty is Honesty.HONEST:
        if spec.strategy is not None:
            raise ScenarioFormatError(f"honest beacon {spec.id} must not carry strategy params")
    elif spec.honesty is Honesty.SABOTAGED_PSRG:
        params = spec.strategy if spec.strategy is not None else SabotageParams()
        if not isinstance(params, SabotageParams):
            raise ScenarioFormatError(f"beacon {spec.id}: sabotaged beacon needs SabotageParams")
        if params.capture_length < 1:
            raise ScenarioFormatError(f"beacon {spec.id}: capture_length must be positive")
        if params.reseed_length < 1:
            raise ScenarioFormatError(f"beacon {spec.id}: reseed_length must be positive")
        if params.marker is not None:
            if not params.marker or set(params.marker) - {"0", "1"}:
                raise ScenarioFormatError(f"beacon {spec.id}: marker must be a non-empty 0/1 string")
    elif spec.honesty is Honesty.ADAPTIVE_COLLUDER:
        params = spec.strategy if spec.strategy is not None else AdaptiveParams()
        if not isinstance(params, AdaptiveParams):
            raise ScenarioFormatError(f"beacon {spec.id}: adaptive beacon needs AdaptiveParams")
        if params.target_sequence is not None:
            if len(params.target_sequence) < raw.length:
                raise ScenarioFormatError(
                    f"beacon {spec.id}: target_sequence shorter than scenario length"
                )
            if any(
                not isinstance(d, int) or not 0 <= d < raw.alphabet.size
                for d in params.target_sequence
            ):
                raise ScenarioFormatError(f"beacon {spec.id}: target digits outside alphabet")


def _check_hash_spec(spec: HashSpec, alphabet_bits: int) -> None:
    try:
        digest_bits = spec.digest_bits()
    except (ValueError, TypeError) as exc:
        raise ScenarioFormatError(f"unknown hash algorithm {spec.algorithm!r}") from exc
    if not 1 <= spec.output_bits <= digest_bits:
        raise ScenarioFormatError(
            f"output_bits must be in [1, {digest_bits}], got {spec.output_bits}"
        )
    if spec.output_bits != alphabet_bits:
        raise ScenarioFormatError(
            f"hash output_bits ({spec.output_bits}) must equal alphabet bit width ({alphabet_bits})"
        )


# --- JSON scenario format ---------------------------------------------------

_TOP_KEYS = {"alphabet", "beacons", "length", "combiner", "hash_spec", "master_seed"}
_BEACON_KEYS = {"position", "phase_offset", "period", "honesty", "strategy_params"}
_HASH_KEYS = {"algorithm", "output_bits"}
_SABOTAGE_KEYS = {"capture_length", "reseed_length", "marker"}
_ADAPTIVE_KEYS = {"target_sequence"}


def _reject_unknown(mapping: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioFormatError(f"unknown keys in {where}: {sorted(unknown)}")


def _require(mapping: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in mapping:
        raise ScenarioFormatError(f"missing key {key!r} in {where}")
    return mapping[key]


def _as_number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFormatError(f"{where} must be a number, got {value!r}")
    return float(value)


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioFormatError(f"{where} must be an integer, got {value!r}")
    return value


def scenario_from_dict(data: Mapping[str, Any]) -> Scenario:
    """Parse the scenario JSON schema; rejects unknown keys at every level.

    Top level: alphabet (letter count), beacons (array), length, combiner
    ("xor" | "time_sharing" | "hash"), optional hash_spec, master_seed.
    Beacon: position, phase_offset, period, honesty, optional strategy_params.
    """
    if not isinstance(data, Mapping):
        raise ScenarioFormatError("scenario document must be a JSON object")
    _reject_unknown(data, _TOP_KEYS, "scenario")
    alphabet = Alphabet(_as_int(_require(data, "alphabet", "scenario"), "alphabet"))
    raw_beacons = _require(data, "beacons", "scenario")
    if not isinstance(raw_beacons, list):
        raise ScenarioFormatError("beacons must be an array")

    beacons = []
    for pos, entry in enumerate(raw_beacons):
        if not isinstance(entry, Mapping):
            raise ScenarioFormatError(f"beacon {pos} must be an object")
        where = f"beacon {pos}"
        _reject_unknown(entry, _BEACON_KEYS, where)
        honesty_name = _require(entry, "honesty", where)
        try:
            honesty = Honesty(honesty_name)
        except ValueError:
            raise ScenarioFormatError(f"{where}: unknown honesty {honesty_name!r}") from None
        strategy = _strategy_from_dict(entry.get("strategy_params"), honesty, where)
        beacons.append(
            BeaconSpec(
                id=pos,
                position=_as_number(_require(entry, "position", where), f"{where} position"),
                phase_offset=_as_number(
                    _require(entry, "phase_offset", where), f"{where} phase_offset"
                ),
                period=_as_number(_require(entry, "period", where), f"{where} period"),
                honesty=honesty,
                strategy=strategy,
            )
        )

    combiner_name = _require(data, "combiner", "scenario")
    try:
        combiner = Combiner(combiner_name)
    except ValueError:
        raise ScenarioFormatError(f"unknown combiner {combiner_name!r}") from None

    hash_spec = None
    if "hash_spec" in data and data["hash_spec"] is not None:
        entry = data["hash_spec"]
        if not isinstance(entry, Mapping):
            raise ScenarioFormatError("hash_spec must be an object")
        _reject_unknown(entry, _HASH_KEYS, "hash_spec")
        hash_spec = HashSpec(
            algorithm=str(entry.get("algorithm", DEFAULT_HASH_ALGORITHM)),
            output_bits=_as_int(_require(entry, "output_bits", "hash_spec"), "output_bits"),
        )

    return Scenario(
        alphabet=alphabet,
        beacons=tuple(beacons),
        length=_as_int(_require(data, "length", "scenario"), "length"),
        combiner=combiner,
        master_seed=_as_int(_require(data, "master_seed", "scenario"), "master_seed"),
        hash_spec=hash_spec,
    )


def _strategy_from_dict(entry: Any, honesty: Honesty, where: str) -> StrategyParams:
    if entry is None:
        entry = {}
    if not isinstance(entry, Mapping):
        raise ScenarioFormatError(f"{where}: strategy_params must be an object")
    if honesty is Honesty.HONEST:
        _reject_unknown(entry, set(), f"{where} strategy_params")
        return None
    if honesty is Honesty.SABOTAGED_PSRG:
        _reject_unknown(entry, _SABOTAGE_KEYS, f"{where} strategy_params")
        params = SabotageParams(
            capture_length=_as_int(
                entry.get("capture_length", DEFAULT_CAPTURE_LENGTH), "capture_length"
            ),
            reseed_length=_as_int(
                entry.get("reseed_length", DEFAULT_RESEED_LENGTH), "reseed_length"
            ),
            marker=entry.get("marker"),
        )
        if params.marker is not None and not isinstance(params.marker, str):
            raise ScenarioFormatError(f"{where}: marker must be a string of 0/1 characters")
        return params
    _reject_unknown(entry, _ADAPTIVE_KEYS, f"{where} strategy_params")
    target = entry.get("target_sequence")
    if target is not None:
        if not isinstance(target, list):
            raise ScenarioFormatError(f"{where}: target_sequence must be an array")
        target = tuple(_as_int(d, f"{where} target digit") for d in target)
    return AdaptiveParams(target_sequence=target)


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    """Inverse of scenario_from_dict (field-by-field round trip)."""
    beacons = []
    for spec in scenario.beacons:
        entry: dict[str, Any] = {
            "position": spec.position,
            "phase_offset": spec.phase_offset,
            "period": spec.period,
            "honesty": spec.honesty.value,
        }
        params: dict[str, Any] = {}
        if isinstance(spec.strategy, SabotageParams):
            params = {
                "capture_length": spec.strategy.capture_length,
                "reseed_length": spec.strategy.reseed_length,
            }
            if spec.strategy.marker is not None:
                params["marker"] = spec.strategy.marker
        elif isinstance(spec.strategy, AdaptiveParams):
            if spec.strategy.target_sequence is not None:
                params = {"target_sequence": list(spec.strategy.target_sequence)}
        if params:
            entry["strategy_params"] = params
        beacons.append(entry)
    out: dict[str, Any] = {
        "alphabet": scenario.alphabet.size,
        "beacons": beacons,
        "length": scenario.length,
        "combiner": scenario.combiner.value,
        "master_seed": scenario.master_seed,
    }
    if scenario.hash_spec is not None:
        out["hash_spec"] = {
            "algorithm": scenario.hash_spec.algorithm,
            "output_bits": scenario.hash_spec.output_bits,
        }
    return out


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Load a raw scenario from a JSON file (validation is separate).

    JSON syntax errors propagate as json.JSONDecodeError; the CLI reports
    them as configuration parse failures, distinct from invalid scenarios.
    """
    text = Path(path).read_text(encoding="utf-8")
    return scenario_from_dict(json.loads(text))


def save_scenario(scenario: Scenario, path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps(scenario_to_dict(scenario), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
