"""Digit-stream generators and the discrete-event emission scheduler.

Three beacon kinds:

* honest: a seeded stand-in for a true random generator (TRG).
* sabotaged: emits a true-random capture prefix, then continues with a
  concealed pseudorandom generator keyed from that prefix; whenever a marker
  bit pattern appears in its output it emits a block of fresh true-random
  digits and rekeys from them (steganographic reseeding).
* adaptive colluder: when every other beacon's current digit is inside its
  past light cone, emits whatever digit forces the XOR resultant onto a
  predetermined target; otherwise it degrades to honest-looking output.

run_emission_schedule processes emissions in global time order (ties broken
by beacon index) and hands each generator exactly the same-index digits of
other beacons that are available at its emission event: already emitted, and
in or on its past light cone.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    AdaptiveParams,
    BeaconSpec,
    DEFAULT_MARKER_BITS,
    DigitRecord,
    Honesty,
    SabotageParams,
    ValidatedScenario,
)
from .errors import StreamExhausted
from .rng import DigitStream, derive_key
from .spacetime import in_forward_cone

PURPOSE_HONEST = "honest-stream"
PURPOSE_SABOTEUR_TRG = "saboteur-trg"
PURPOSE_FALLBACK = "adaptive-fallback"
PURPOSE_TARGET = "adaptive-target"
PURPOSE_MARKER = "marker"

_PSRG_SEED_TAG = b"beacon-forge.psrg-seed"
_PSRG_RESEED_TAG = b"beacon-forge.psrg-reseed"

MODE_CAPTURING = "capturing"
MODE_PSEUDORANDOM = "pseudorandom"
MODE_RESEEDING = "reseeding"


def digit_bit_width(size: int) -> int:
    """Fixed serialization width, in bits, of one digit from a size-letter alphabet."""
    return (size - 1).bit_length()


def derive_marker(master_seed: int, beacon: int, bits: int = DEFAULT_MARKER_BITS) -> str:
    """Default marker pattern for a saboteur, as a '0'/'1' string."""
    key = derive_key(master_seed, PURPOSE_MARKER, beacon)
    value = int.from_bytes(key, "big") >> (len(key) * 8 - bits)
    return format(value, f"0{bits}b")


def resolve_sabotage(scenario: ValidatedScenario, beacon: int) -> "ResolvedSabotage":
    """Concrete saboteur parameters with the marker derivation applied."""
    spec = scenario.beacons[beacon]
    params = spec.strategy if isinstance(spec.strategy, SabotageParams) else SabotageParams()
    marker = params.marker or derive_marker(scenario.master_seed, beacon)
    return ResolvedSabotage(
        capture_length=params.capture_length,
        reseed_length=params.reseed_length,
        marker=marker,
    )


def resolve_target(scenario: ValidatedScenario, beacon: int) -> tuple[int, ...]:
    """The digit sequence an adaptive colluder tries to force, length L."""
    spec = scenario.beacons[beacon]
    params = spec.strategy if isinstance(spec.strategy, AdaptiveParams) else AdaptiveParams()
    if params.target_sequence is not None:
        return params.target_sequence[: scenario.length]
    stream = DigitStream(
        derive_key(scenario.master_seed, PURPOSE_TARGET, beacon), scenario.alphabet.size
    )
    return tuple(stream.digits(scenario.length))


@dataclass(frozen=True)
class ResolvedSabotage:
    capture_length: int
    reseed_length: int
    marker: str


def psrg_key_from_capture(size: int, digits: Sequence[int]) -> bytes:
    """Key the concealed generator from the published capture prefix.

    Depends only on public information, so an accomplice who saw the prefix
    derives the same key.
    """
    h = hashlib.sha256()
    h.update(_PSRG_SEED_TAG)
    h.update(size.to_bytes(8, "big"))
    for digit in digits:
        h.update(digit.to_bytes(8, "big"))
    return h.digest()


def psrg_key_from_reseed(previous_key: bytes, size: int, digits: Sequence[int]) -> bytes:
    """Rekey the concealed generator from a published reseed block."""
    h = hashlib.sha256()
    h.update(_PSRG_RESEED_TAG)
    h.update(previous_key)
    h.update(size.to_bytes(8, "big"))
    for digit in digits:
        h.update(digit.to_bytes(8, "big"))
    return h.digest()


class HonestBeacon:
    """Uniform digits from a per-beacon derived stream; index-reproducible."""

    def __init__(self, key: bytes, size: int, length: int):
        self._stream = DigitStream(key, size)
        self._length = length
        self.counter = 0

    def emit(self, index: int, overheard: Sequence[DigitRecord] = ()) -> int:
        if self.counter >= self._length:
            raise StreamExhausted(f"stream of length {self._length} exhausted")
        self.counter += 1
        return self._stream.next_digit()


class SabotagedBeacon:
    """Seed-capturing saboteur with steganographic reseeding.

    Mode transitions: capturing for the first capture_length digits, then
    pseudorandom; whenever the trailing emitted bits equal the marker while
    pseudorandom, the next reseed_length digits are true random (reseeding)
    and key the next pseudorandom phase. Marker matching scans the emitted
    bit stream (digits in fixed-width binary, MSB first) with overlapping
    windows; matching is suspended during reseeding.
    """

    def __init__(self, trg_key: bytes, size: int, length: int, params: ResolvedSabotage):
        self._trg = DigitStream(trg_key, size)
        self._size = size
        self._length = length
        self._params = params
        self._digit_bits = digit_bit_width(size)
        self._marker = tuple(int(b) for b in params.marker)
        self._window: deque[int] = deque(maxlen=len(self._marker))
        self._captured: list[int] = []
        self._reseed_buffer: list[int] = []
        self._reseed_remaining = 0
        self._psrg: Optional[DigitStream] = None
        self._psrg_key: Optional[bytes] = None
        self.mode = MODE_CAPTURING
        self.mode_log: list[str] = []
        self.counter = 0

    def _push_bits(self, digit: int) -> None:
        for shift in range(self._digit_bits - 1, -1, -1):
            self._window.append((digit >> shift) & 1)

    def _marker_fired(self) -> bool:
        return len(self._window) == len(self._marker) and tuple(self._window) == self._marker

    def emit(self, index: int, overheard: Sequence[DigitRecord] = ()) -> int:
        if self.counter >= self._length:
            raise StreamExhausted(f"stream of length {self._length} exhausted")
        self.counter += 1
        mode = self.mode
        self.mode_log.append(mode)

        if mode == MODE_CAPTURING:
            digit = self._trg.next_digit()
            self._captured.append(digit)
            self._push_bits(digit)
            if len(self._captured) == self._params.capture_length:
                self._psrg_key = psrg_key_from_capture(self._size, self._captured)
                self._psrg = DigitStream(self._psrg_key, self._size)
                self.mode = MODE_PSEUDORANDOM
            return digit

        if mode == MODE_PSEUDORANDOM:
            assert self._psrg is not None
            digit = self._psrg.next_digit()
            self._push_bits(digit)
            if self._marker_fired():
                self.mode = MODE_RESEEDING
                self._reseed_remaining = self._params.reseed_length
                self._reseed_buffer = []
            return digit

        digit = self._trg.next_digit()
        self._push_bits(digit)
        self._reseed_buffer.append(digit)
        self._reseed_remaining -= 1
        if self._reseed_remaining == 0:
            assert self._psrg_key is not None
            self._psrg_key = psrg_key_from_reseed(self._psrg_key, self._size, self._reseed_buffer)
            self._psrg = DigitStream(self._psrg_key, self._size)
            self.mode = MODE_PSEUDORANDOM
        return digit


class AdaptiveBeacon:
    """Colluder that forces the XOR resultant onto a target when it can.

    With every other beacon's index-i digit overheard, emits
    target(i) - sum(overheard) mod size; otherwise emits a digit from its own
    seeded fallback stream so its output still looks honest.
    """

    def __init__(self, fallback_key: bytes, size: int, length: int,
                 target: Sequence[int], beacon_count: int):
        self._fallback = DigitStream(fallback_key, size)
        self._size = size
        self._length = length
        self._target = tuple(target)
        self._others = beacon_count - 1
        self.counter = 0

    def emit(self, index: int, overheard: Sequence[DigitRecord] = ()) -> int:
        if self.counter >= self._length:
            raise StreamExhausted(f"stream of length {self._length} exhausted")
        self.counter += 1
        if len(overheard) == self._others:
            heard_sum = sum(rec.digit for rec in overheard)
            return (self._target[index] - heard_sum) % self._size
        return self._fallback.next_digit()


def build_generator(scenario: ValidatedScenario, beacon: int):
    spec: BeaconSpec = scenario.beacons[beacon]
    size = scenario.alphabet.size
    length = scenario.length
    seed = scenario.master_seed
    if spec.honesty is Honesty.HONEST:
        return HonestBeacon(derive_key(seed, PURPOSE_HONEST, beacon), size, length)
    if spec.honesty is Honesty.SABOTAGED_PSRG:
        return SabotagedBeacon(
            derive_key(seed, PURPOSE_SABOTEUR_TRG, beacon),
            size,
            length,
            resolve_sabotage(scenario, beacon),
        )
    return AdaptiveBeacon(
        derive_key(seed, PURPOSE_FALLBACK, beacon),
        size,
        length,
        resolve_target(scenario, beacon),
        scenario.beacon_count,
    )


def overheard_beacons(scenario: ValidatedScenario, beacon: int, index: int) -> tuple[int, ...]:
    """Other beacons whose index-i digit is available to this beacon at emission.

    Available means emitted strictly earlier in schedule order (time, then
    beacon index) and inside or on the past light cone of the emission event.
    """
    own = scenario.emission_event(beacon, index)
    out = []
    for other in range(scenario.beacon_count):
        if other == beacon:
            continue
        theirs = scenario.emission_event(other, index)
        if (theirs.time, other) < (own.time, beacon) and in_forward_cone(theirs, own):
            out.append(other)
    return tuple(out)


def run_emission_schedule(scenario: ValidatedScenario) -> list[DigitRecord]:
    """Run the scenario into its complete n*L ledger, in global schedule order."""
    n = scenario.beacon_count
    generators = [build_generator(scenario, b) for b in range(n)]
    schedule = sorted(
        (scenario.emission_event(b, i).time, b, i)
        for b in range(n)
        for i in range(scenario.length)
    )
    records: dict[tuple[int, int], DigitRecord] = {}
    ledger: list[DigitRecord] = []
    for _, beacon, index in schedule:
        overheard = [records[(other, index)] for other in overheard_beacons(scenario, beacon, index)]
        digit = generators[beacon].emit(index, overheard)
        record = DigitRecord(beacon, index, digit, scenario.emission_event(beacon, index))
        records[(beacon, index)] = record
        ledger.append(record)
    return ledger


def write_ledger_csv(ledger: Sequence[DigitRecord], path) -> None:
    """Ledger export: beacon_id, stream_index, digit, position, time."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["beacon_id", "stream_index", "digit", "position", "time"])
        for rec in ledger:
            writer.writerow(
                [rec.beacon, rec.stream_index, rec.digit, repr(rec.event.position), repr(rec.event.time)]
            )
