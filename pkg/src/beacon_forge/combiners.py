"""The three resultant-stream protocols: modular XOR, time sharing, hashing.

All three are pure functions. The hash combiner's input encoding is part of
the wire contract: an 8-byte big-endian stream index followed by each beacon
digit as a big-endian field of ceil(d/8) bytes in beacon order, where d is
the alphabet bit width. The resultant digit is the first d bits of the
digest, most significant first.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Sequence

from .core import Combiner, DigitRecord, HashSpec, ValidatedScenario
from .errors import AlphabetNotPowerOfTwo, DigitOutOfRange, MissingRecord


def combine_xor(digits: Sequence[int], size: int) -> int:
    """Mod-size sum of one digit per beacon (the generalized XOR)."""
    total = 0
    for digit in digits:
        if not 0 <= digit < size:
            raise DigitOutOfRange(f"digit {digit} outside [0, {size})")
        total += digit
    return total % size


def combine_time_sharing(ledger: Iterable[DigitRecord], index: int, beacon_count: int) -> int:
    """Digit of beacon (index mod beacon_count) at this stream index."""
    owner = index % beacon_count
    for rec in ledger:
        if rec.beacon == owner and rec.stream_index == index:
            return rec.digit
    raise MissingRecord(f"no record for beacon {owner} at index {index}")


def hash_input_encoding(digits: Sequence[int], index: int, spec: HashSpec) -> bytes:
    field_width = (spec.output_bits + 7) // 8
    parts = [index.to_bytes(8, "big")]
    limit = 1 << spec.output_bits
    for digit in digits:
        if not 0 <= digit < limit:
            raise DigitOutOfRange(f"digit {digit} outside [0, {limit})")
        parts.append(digit.to_bytes(field_width, "big"))
    return b"".join(parts)


def combine_hash(digits: Sequence[int], index: int, spec: HashSpec) -> int:
    """First output_bits bits (MSB first) of the digest over the documented encoding."""
    digest = hashlib.new(spec.algorithm, hash_input_encoding(digits, index, spec)).digest()
    nbytes = (spec.output_bits + 7) // 8
    value = int.from_bytes(digest[:nbytes], "big")
    return value >> (8 * nbytes - spec.output_bits)


def resultant_stream(scenario: ValidatedScenario, ledger: Sequence[DigitRecord]) -> list[int]:
    """Apply the scenario's combiner to a complete ledger, index by index."""
    n = scenario.beacon_count
    size = scenario.alphabet.size
    by_key = {(rec.beacon, rec.stream_index): rec.digit for rec in ledger}

    def digits_at(i: int) -> list[int]:
        try:
            return [by_key[(b, i)] for b in range(n)]
        except KeyError as exc:
            raise MissingRecord(f"ledger lacks a digit at index {i}") from exc

    if scenario.combiner is Combiner.XOR:
        return [combine_xor(digits_at(i), size) for i in range(scenario.length)]
    if scenario.combiner is Combiner.TIME_SHARING:
        out = []
        for i in range(scenario.length):
            key = (i % n, i)
            if key not in by_key:
                raise MissingRecord(f"no record for beacon {key[0]} at index {i}")
            out.append(by_key[key])
        return out
    if scenario.alphabet.bit_width is None:
        raise AlphabetNotPowerOfTwo(f"hash combiner needs 2^d letters, got {size}")
    spec = scenario.hash_spec or HashSpec(output_bits=scenario.alphabet.bit_width)
    return [combine_hash(digits_at(i), i, spec) for i in range(scenario.length)]
