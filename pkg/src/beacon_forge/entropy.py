"""Exact, analytic, and Monte Carlo entropy measures of combined streams.

Everything here evaluates a stream "as seen by the dishonest users", i.e.
conditioned on the conspiracy's knowledge: which beacons are sabotaged,
their strategies, and their predetermined outputs. Honest digits are i.i.d.
uniform; a sabotaged beacon's output is a known deterministic sequence; an
adaptive colluder cancels the digits it can overhear.

Two sabotage-knowledge conventions are supported and always labeled:

* known subset: the dishonest identities are fixed. The stream has a single
  conditional distribution, enumerated exactly.
* random subset: k of n beacons are sabotaged uniformly at random. The
  enumeration yields one conditional distribution per subset, and the
  aggregate measures condition on the draw: min entropy is
  -log2(E_subset[max probability]) and Shannon entropy is
  E_subset[H(conditional)]. Averaging the conditionals this way is what
  makes a possibly-sabotaged single beacon score near zero min entropy while
  its Shannon entropy stays high.

Per-sequence distributions factor across stream indices (honest digits are
independent across indices and every combiner acts index by index), so the
enumeration walks honest digit assignments one index at a time and takes the
product, instead of materializing the full joint assignment space.
"""

from __future__ import annotations

import itertools
import math
import random
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Sequence

from .beacons import overheard_beacons, resolve_target
from .combiners import combine_hash
from .core import Combiner, HashSpec, Honesty, ValidatedScenario
from .errors import AlphabetNotPowerOfTwo, EmptyDistribution, EnumerationTooLarge, InvalidCounts
from .rng import derive_seed
from .spacetime import all_pairs_spacelike

DEFAULT_MAX_STATES = 10_000_000

PROVENANCE_EXACT = "exact-enumeration"
PROVENANCE_ANALYTIC = "analytic"
PROVENANCE_EMPIRICAL = "empirical"


class Protocol(Enum):
    """Stream under analysis: a combiner's output, or one beacon by itself."""

    XOR = "xor"
    TIME_SHARING = "time_sharing"
    HASH = "hash"
    SINGLE_BEACON = "single_beacon"

    @classmethod
    def from_combiner(cls, combiner: Combiner) -> "Protocol":
        return cls(combiner.value)


@dataclass(frozen=True)
class SabotageModel:
    """Which beacons are dishonest, and whether they adapt when geometry allows.

    dishonest is the known subset; when None, the subset is uniformly random
    over all k-subsets. Non-adapting dishonest beacons emit a predetermined
    sequence (a known placeholder; its value cannot affect any entropy).
    """

    dishonest: Optional[tuple[int, ...]] = None
    k: Optional[int] = None
    adaptive: bool = False

    @classmethod
    def known(cls, *indices: int, adaptive: bool = False) -> "SabotageModel":
        return cls(dishonest=tuple(sorted(indices)), k=None, adaptive=adaptive)

    @classmethod
    def random_subset(cls, k: int, adaptive: bool = False) -> "SabotageModel":
        return cls(dishonest=None, k=k, adaptive=adaptive)

    @classmethod
    def from_scenario(cls, scenario: ValidatedScenario) -> "SabotageModel":
        adaptive = any(
            b.honesty is Honesty.ADAPTIVE_COLLUDER for b in scenario.beacons
        )
        return cls.known(*scenario.dishonest_indices, adaptive=adaptive)

    def subset_count(self, n: int) -> int:
        if self.dishonest is not None:
            return 1
        return math.comb(n, self.k or 0)

    def subsets(self, n: int) -> list[tuple[int, ...]]:
        if self.dishonest is not None:
            if any(not 0 <= b < n for b in self.dishonest):
                raise InvalidCounts(f"dishonest indices {self.dishonest} outside 0..{n - 1}")
            return [self.dishonest]
        if self.k is None or not 0 <= self.k <= n:
            raise InvalidCounts(f"k must lie in [0, {n}], got {self.k}")
        return [tuple(s) for s in itertools.combinations(range(n), self.k)]


@dataclass(frozen=True)
class SequenceDistribution:
    """Probability over whole digit sequences of one fixed length."""

    probs: dict[tuple[int, ...], float]
    provenance: str

    def total(self) -> float:
        return sum(self.probs.values())


@dataclass(frozen=True)
class EntropyReport:
    """Per-character entropies of a combined stream, with full labeling."""

    protocol: str
    separation: str
    n: int
    k: int
    alphabet_size: int
    length: int
    min_entropy_per_char: float
    shannon_per_char: float
    method: str

    def __post_init__(self) -> None:
        cap = math.log2(self.alphabet_size)
        if not (-1e-9 <= self.min_entropy_per_char <= self.shannon_per_char + 1e-9 <= cap + 2e-9):
            raise ValueError(
                f"entropy ordering violated: 0 <= {self.min_entropy_per_char} <= "
                f"{self.shannon_per_char} <= {cap}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "protocol": self.protocol,
            "separation": self.separation,
            "n": self.n,
            "k": self.k,
            "l": self.alphabet_size,
            "L": self.length,
            "min_entropy_per_char_bits": self.min_entropy_per_char,
            "shannon_per_char_bits": self.shannon_per_char,
            "method": self.method,
        }


def min_entropy_exact(dist: SequenceDistribution) -> float:
    """-log2 of the most likely sequence's probability, in bits."""
    if not dist.probs:
        raise EmptyDistribution("no sequences in support")
    return -math.log2(max(dist.probs.values())) + 0.0


def shannon_entropy(dist: SequenceDistribution) -> float:
    """-sum p log2 p in bits, with 0 log 0 = 0."""
    if not dist.probs:
        raise EmptyDistribution("no sequences in support")
    return -sum(p * math.log2(p) for p in dist.probs.values() if p > 0.0)


def conditional_min_entropy(components: Sequence[tuple[float, SequenceDistribution]]) -> float:
    """Min entropy given the subset draw: -log2 of the expected top probability."""
    if not components:
        raise EmptyDistribution("no components")
    return -math.log2(sum(w * max(dist.probs.values()) for w, dist in components)) + 0.0

def conditional_shannon(components: Sequence[tuple[float, SequenceDistribution]]) -> float:
    """Expected Shannon entropy of the conditional distributions."""
    if not components:
        raise EmptyDistribution("no components")
    return sum(w * shannon_entropy(dist) for w, dist in components)


def _hash_spec_for(scenario: ValidatedScenario) -> HashSpec:
    width = scenario.alphabet.bit_width
    if width is None:
        raise AlphabetNotPowerOfTwo(
            f"hash protocol needs a power-of-two alphabet, got {scenario.alphabet.size}"
        )
    return scenario.hash_spec or HashSpec(output_bits=width)


def _index_factor(
    scenario: ValidatedScenario,
    protocol: Protocol,
    dishonest: frozenset[int],
    adaptive: bool,
    index: int,
    targets: dict[int, tuple[int, ...]],
    hash_spec: Optional[HashSpec],
) -> dict[int, float]:
    """Exact distribution of the stream digit at one index, given the subset.

    Enumerates every assignment of the honest digits; dishonest digits follow
    their strategy deterministically (predetermined placeholder, or the
    adaptive cancellation when the beacon overhears everyone else).
    """
    n = scenario.beacon_count
    size = scenario.alphabet.size
    honest = [b for b in range(n) if b not in dishonest]
    forcer = None
    if adaptive:
        for b in sorted(dishonest):
            if len(overheard_beacons(scenario, b, index)) == n - 1:
                forcer = b
                break

    weight = 1.0 / size ** len(honest)
    factor: dict[int, float] = {}
    for assignment in itertools.product(range(size), repeat=len(honest)):
        digits = [0] * n
        for b, digit in zip(honest, assignment):
            digits[b] = digit
        if forcer is not None:
            others = sum(digits[b] for b in range(n) if b != forcer)
            digits[forcer] = (targets[forcer][index] - others) % size

        if protocol is Protocol.XOR:
            value = sum(digits) % size
        elif protocol is Protocol.TIME_SHARING:
            value = digits[index % n]
        elif protocol is Protocol.HASH:
            assert hash_spec is not None
            value = combine_hash(digits, index, hash_spec)
        else:
            value = digits[0]
        factor[value] = factor.get(value, 0.0) + weight
    return factor


def _component_factors(
    scenario: ValidatedScenario,
    protocol: Protocol,
    model: SabotageModel,
    max_states: int,
) -> list[tuple[tuple[int, ...], list[dict[int, float]]]]:
    n = scenario.beacon_count
    size = scenario.alphabet.size
    subsets = model.subsets(n)
    heaviest = max((n - len(s) for s in subsets), default=0)
    cost = len(subsets) * scenario.length * size**heaviest
    if cost > max_states:
        raise EnumerationTooLarge(
            f"per-index enumeration needs {cost} states, cap is {max_states}"
        )
    hash_spec = _hash_spec_for(scenario) if protocol is Protocol.HASH else None
    targets = {b: resolve_target(scenario, b) for b in range(n)} if model.adaptive else {}
    out = []
    for subset in subsets:
        factors = [
            _index_factor(scenario, protocol, frozenset(subset), model.adaptive, i, targets, hash_spec)
            for i in range(scenario.length)
        ]
        out.append((subset, factors))
    return out


def _product_distribution(factors: Sequence[dict[int, float]], max_states: int) -> dict[tuple[int, ...], float]:
    predicted = 1
    for factor in factors:
        predicted *= len(factor)
        if predicted > max_states:
            raise EnumerationTooLarge(f"sequence support would exceed {max_states} states")
    sequences: dict[tuple[int, ...], float] = {(): 1.0}
    for factor in factors:
        sequences = {
            prefix + (digit,): p * q
            for prefix, p in sequences.items()
            for digit, q in factor.items()
        }
    return sequences


def resultant_components(
    scenario: ValidatedScenario,
    protocol: Protocol,
    model: SabotageModel,
    max_states: int = DEFAULT_MAX_STATES,
) -> list[tuple[float, SequenceDistribution]]:
    """One exact conditional sequence distribution per dishonest subset."""
    per_subset = _component_factors(scenario, protocol, model, max_states)
    weight = 1.0 / len(per_subset)
    return [
        (weight, SequenceDistribution(_product_distribution(factors, max_states), PROVENANCE_EXACT))
        for _, factors in per_subset
    ]


def resultant_distribution(
    scenario: ValidatedScenario,
    protocol: Protocol,
    model: SabotageModel,
    max_states: int = DEFAULT_MAX_STATES,
) -> SequenceDistribution:
    """Exact distribution of the combined sequence.

    With a known subset this is the single conditional distribution; with a
    random subset it is the mixture over the uniform subset draw.
    """
    components = resultant_components(scenario, protocol, model, max_states)
    if len(components) == 1:
        return components[0][1]
    mixed: dict[tuple[int, ...], float] = {}
    for weight, dist in components:
        if len(mixed) + len(dist.probs) > max_states:
            raise EnumerationTooLarge(f"mixture support would exceed {max_states} states")
        for seq, p in dist.probs.items():
            mixed[seq] = mixed.get(seq, 0.0) + weight * p
    return SequenceDistribution(mixed, PROVENANCE_EXACT)


def single_beacon_min_entropy(n: int, k: int, size: int, length: int) -> float:
    """Per-character min entropy of one beacon under a random sabotaged subset.

    A sabotaged beacon's whole sequence is predetermined, so the top sequence
    probability is k/n + (1 - k/n) / size^length.
    """
    if n < 1 or not 0 <= k <= n:
        raise InvalidCounts(f"need 0 <= k <= n with n >= 1, got n={n}, k={k}")
    if size < 2 or length < 1:
        raise InvalidCounts(f"need size >= 2 and length >= 1, got {size}, {length}")
    top = k / n + (1 - k / n) * size ** (-length)
    return -math.log2(top) / length + 0.0


def min_entropy_table(n: int, k: int) -> dict[str, dict[str, float]]:
    """Per-character min entropy of both protocols, in units of log2(size).

    Rows are beacon separation, columns the combiner. The timelike XOR entry
    assumes the worst case: a dishonest beacon has every other beacon in its
    past light cone and forces a predetermined resultant. For k = 0 every
    entry is 1 (fully honest); for k = n every entry is 0.
    """
    if n < 1 or not 0 <= k <= n:
        raise InvalidCounts(f"need 0 <= k <= n with n >= 1, got n={n}, k={k}")
    if k == 0:
        shared = 1.0
        return {
            "spacelike": {"xor": 1.0, "time_sharing": shared},
            "timelike": {"xor": 1.0, "time_sharing": shared},
        }
    ts = (n - k) / n
    xor_spacelike = 0.0 if k == n else 1.0
    return {
        "spacelike": {"xor": xor_spacelike, "time_sharing": ts},
        "timelike": {"xor": 0.0, "time_sharing": ts},
    }


def entropy_report(
    scenario: ValidatedScenario,
    protocol: Protocol,
    model: SabotageModel,
    max_states: int = DEFAULT_MAX_STATES,
) -> EntropyReport:
    """Exact per-character entropies of the chosen stream under the model."""
    components = resultant_components(scenario, protocol, model, max_states)
    k = len(model.dishonest) if model.dishonest is not None else (model.k or 0)
    return EntropyReport(
        protocol=protocol.value,
        separation="spacelike" if all_pairs_spacelike(scenario) else "timelike",
        n=scenario.beacon_count,
        k=k,
        alphabet_size=scenario.alphabet.size,
        length=scenario.length,
        min_entropy_per_char=conditional_min_entropy(components) / scenario.length,
        shannon_per_char=conditional_shannon(components) / scenario.length,
        method=PROVENANCE_EXACT,
    )


# --- Monte Carlo estimation ---------------------------------------------------


def sample_resultant(
    scenario: ValidatedScenario,
    protocol: Protocol,
    model: SabotageModel,
    samples: int,
    seed: int,
    batch: int = 0,
    max_states: int = DEFAULT_MAX_STATES,
) -> Counter:
    """Draw whole sequences from the model; batches with distinct indices merge
    into an estimate independent of scheduling."""
    per_subset = _component_factors(scenario, protocol, model, max_states)
    tables = []
    for _, factors in per_subset:
        rows = []
        for factor in factors:
            values = sorted(factor)
            cumulative = list(itertools.accumulate(factor[v] for v in values))
            rows.append((values, cumulative))
        tables.append(rows)

    rng = random.Random(derive_seed(seed, "entropy-mc", batch))
    counts: Counter = Counter()
    for _ in range(samples):
        rows = tables[rng.randrange(len(tables))]
        seq = tuple(
            values[min(bisect_left(cumulative, rng.random()), len(values) - 1)]
            for values, cumulative in rows
        )
        counts[seq] += 1
    return counts


def min_entropy_empirical(counts: Counter, total: int, length: int) -> float:
    """Plug-in per-character min entropy from sampled sequence frequencies."""
    if not counts or total < 1:
        raise EmptyDistribution("no samples")
    return -math.log2(max(counts.values()) / total) / length
