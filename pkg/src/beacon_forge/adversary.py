"""Attack strategies against the combiners, plus the accomplice predictor.

Three attacks on the hash combiner for the two-beacon case where Eve runs
the first beacon:

* bias: exhaustive search for the constant digit whose broadcast forces one
  chosen output bit for as many honest digits as possible.
* adaptive target: having overheard the honest digit, search for the input
  digit whose hash lands nearest a predetermined target.
* budgeted bit forcing: sample 2^m random inputs trying to pin m chosen
  output bits.

Attack statistics are measured under the ideal-hash (random function) model;
the named digest is assumed to behave that way at these widths. All sampling
is without replacement, and every tie breaks toward the numerically smallest
input, so results are reproducible and independent of execution order.

The predictor model captures what beacon conspirators can say about each
combined digit from a given vantage point: a point mass where the digit is
determined by their knowledge, uniform wherever an unheard honest digit
enters.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence

from .beacons import overheard_beacons, psrg_key_from_capture, psrg_key_from_reseed, \
    digit_bit_width, resolve_sabotage, resolve_target, ResolvedSabotage
from .combiners import combine_hash, combine_xor
from .core import Combiner, DigitRecord, HashSpec, Honesty, ValidatedScenario
from .errors import MaskWiderThanOutput, WidthTooLarge
from .rng import DigitStream, derive_seed
from .spacetime import SpacetimeEvent, in_forward_cone

EXHAUSTIVE_WIDTH_CAP = 16


@dataclass(frozen=True)
class AttackBudget:
    """Maximum number of hash evaluations Eve may spend."""

    evaluations: int

    def __post_init__(self) -> None:
        if self.evaluations < 1:
            raise ValueError("budget must allow at least one evaluation")


@dataclass(frozen=True)
class BiasSearchResult:
    """Constant digit to broadcast, and how many honest digits escape the bias."""

    broadcast_digit: int
    residual_count: int


@dataclass(frozen=True)
class AdaptiveSearchResult:
    """Best digit found and its Hamming distance from the target."""

    chosen_digit: int
    achieved_distance: int


@dataclass(frozen=True)
class AttackReport:
    """Aggregate statistics of an attack run, exportable as JSON."""

    attack: str
    d: int
    budget: int
    trials: int
    success_rate: float
    mean_distance: float
    x_values_sampled: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "attack": self.attack,
            "d": self.d,
            "budget": self.budget,
            "trials": self.trials,
            "success_rate": self.success_rate,
            "mean_distance": self.mean_distance,
            "x_values_sampled": self.x_values_sampled,
        }


def _output_bit(value: int, bit_position: int, width: int) -> int:
    # bit_position 0 is the most significant (first) output bit
    return (value >> (width - 1 - bit_position)) & 1


def find_bias_string(
    spec: HashSpec,
    bit_position: int,
    forced_value: int,
    index: int = 0,
    max_width: int = EXHAUSTIVE_WIDTH_CAP,
) -> BiasSearchResult:
    """Exhaustively find the constant input minimizing unforced honest digits.

    Scans all 2^d Eve digits x against all 2^d honest digits y, counting the
    y for which the chosen output bit of h(x, y) differs from forced_value.
    Ties break toward the smallest x.
    """
    d = spec.output_bits
    if d > max_width:
        raise WidthTooLarge(f"exhaustive search capped at width {max_width}, got {d}")
    if not 0 <= bit_position < d:
        raise MaskWiderThanOutput(f"bit position {bit_position} outside [0, {d})")
    size = 1 << d
    best_x = 0
    best_count = size + 1
    for x in range(size):
        count = 0
        for y in range(size):
            if _output_bit(combine_hash((x, y), index, spec), bit_position, d) != forced_value:
                count += 1
        if count < best_count:
            best_x, best_count = x, count
    return BiasSearchResult(broadcast_digit=best_x, residual_count=best_count)


def adaptive_target_attack(
    spec: HashSpec,
    overheard_digit: int,
    target_digit: int,
    budget: AttackBudget,
    index: int = 0,
    rng: Optional[random.Random] = None,
) -> AdaptiveSearchResult:
    """Minimize the Hamming distance between the target and h(x, overheard).

    Tries every x when the budget covers the whole input space, otherwise a
    uniform sample without replacement (an rng is then required). Ties break
    toward the numerically smallest x.
    """
    d = spec.output_bits
    size = 1 << d
    if budget.evaluations >= size:
        candidates: Sequence[int] = range(size)
    else:
        if rng is None:
            raise ValueError("partial budgets need an rng for sampling")
        candidates = rng.sample(range(size), budget.evaluations)
    best_x = -1
    best_dist = d + 1
    for x in candidates:
        dist = (combine_hash((x, overheard_digit), index, spec) ^ target_digit).bit_count()
        if dist < best_dist or (dist == best_dist and x < best_x):
            best_x, best_dist = x, dist
    return AdaptiveSearchResult(chosen_digit=best_x, achieved_distance=best_dist)


def _check_mask(mask: Sequence[int], d: int) -> None:
    if len(mask) > d or len(set(mask)) != len(mask):
        raise MaskWiderThanOutput(f"mask of {len(mask)} distinct positions must fit in {d} bits")
    if any(not 0 <= p < d for p in mask):
        raise MaskWiderThanOutput(f"mask positions must lie in [0, {d})")


def _masked_distance(value: int, mask: Sequence[int], wanted: Sequence[int], d: int) -> int:
    return sum(1 for p, w in zip(mask, wanted) if _output_bit(value, p, d) != w)


def budgeted_force_bits(
    spec: HashSpec,
    overheard_digit: int,
    mask: Sequence[int],
    wanted: Sequence[int],
    rng: random.Random,
    index: int = 0,
) -> Optional[int]:
    """Pin the masked output bits by trying 2^m random distinct inputs.

    Returns the first sampled x whose masked bits all match, or None when the
    whole sample fails. m = len(mask); the budget is fixed at 2^m draws.
    """
    found, _, _ = _budgeted_scan(spec, overheard_digit, mask, wanted, rng, index)
    return found


def _budgeted_scan(
    spec: HashSpec,
    overheard_digit: int,
    mask: Sequence[int],
    wanted: Sequence[int],
    rng: random.Random,
    index: int = 0,
) -> tuple[Optional[int], int, int]:
    """(first hit or None, evaluations used, best masked distance seen)."""
    d = spec.output_bits
    _check_mask(mask, d)
    if len(wanted) != len(mask):
        raise ValueError("wanted must align with mask")
    budget = 1 << len(mask)
    sample = rng.sample(range(1 << d), min(budget, 1 << d))
    best = len(mask)
    for used, x in enumerate(sample, start=1):
        dist = _masked_distance(combine_hash((x, overheard_digit), index, spec), mask, wanted, d)
        best = min(best, dist)
        if dist == 0:
            return x, used, 0
    return None, len(sample), best


# --- Monte Carlo drivers -----------------------------------------------------


def run_adaptive_attack_trials(
    spec: HashSpec,
    budget: AttackBudget,
    trials: int,
    seed: int,
    workers: int = 1,
) -> AttackReport:
    """Repeated adaptive-target attacks with fresh (honest digit, target) per trial.

    Trial t draws its own generator from (seed, t) and attacks at stream
    index t, so results are a pure function of (seed, t) and merging is
    independent of execution order or worker count.
    """
    d = spec.output_bits
    size = 1 << d

    def one(trial: int) -> int:
        rng = random.Random(derive_seed(seed, "attack-adaptive", trial))
        y = rng.randrange(size)
        z = rng.randrange(size)
        return adaptive_target_attack(spec, y, z, budget, index=trial, rng=rng).achieved_distance

    distances = _map_trials(one, trials, workers)
    hits = sum(1 for dist in distances if dist == 0)
    return AttackReport(
        attack="adaptive",
        d=d,
        budget=budget.evaluations,
        trials=trials,
        success_rate=hits / trials,
        mean_distance=sum(distances) / trials,
        x_values_sampled=trials * min(budget.evaluations, size),
    )


def run_budgeted_force_trials(
    spec: HashSpec,
    mask: Sequence[int],
    trials: int,
    seed: int,
    workers: int = 1,
) -> AttackReport:
    """Repeated budgeted bit-forcing with fresh honest digit and wanted bits."""
    d = spec.output_bits
    size = 1 << d
    m = len(mask)
    _check_mask(mask, d)

    def one(trial: int) -> tuple[bool, int, int]:
        rng = random.Random(derive_seed(seed, "attack-budgeted", trial))
        y = rng.randrange(size)
        wanted = [rng.randrange(2) for _ in mask]
        found, used, best = _budgeted_scan(spec, y, mask, wanted, rng, index=trial)
        return found is not None, used, best

    outcomes = _map_trials(one, trials, workers)
    hits = sum(1 for ok, _, _ in outcomes if ok)
    return AttackReport(
        attack="budgeted",
        d=d,
        budget=1 << m,
        trials=trials,
        success_rate=hits / trials,
        mean_distance=sum(best for _, _, best in outcomes) / trials,
        x_values_sampled=sum(used for _, used, _ in outcomes),
    )


def bias_attack_report(spec: HashSpec, bit_position: int = 0, forced_value: int = 0,
                       index: int = 0) -> AttackReport:
    """Single deterministic bias search, reported in the common schema."""
    d = spec.output_bits
    size = 1 << d
    result = find_bias_string(spec, bit_position, forced_value, index=index)
    return AttackReport(
        attack="bias",
        d=d,
        budget=size * size,
        trials=1,
        success_rate=(size - result.residual_count) / size,
        mean_distance=result.residual_count / size,
        x_values_sampled=size * size,
    )


def _map_trials(fn, trials: int, workers: int) -> list:
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


# --- Accomplice predictor -----------------------------------------------------


@dataclass(frozen=True)
class PredictorModel:
    """What the conspiracy knows: dishonest identities, strategies, vantage."""

    dishonest_set: frozenset[int]
    strategies: Mapping[int, Any]
    vantage: SpacetimeEvent


def accomplice_model(scenario: ValidatedScenario, vantage: SpacetimeEvent) -> PredictorModel:
    """Predictor built from the scenario's own dishonesty labels."""
    strategies: dict[int, Any] = {}
    for b in scenario.dishonest_indices:
        if scenario.beacons[b].honesty is Honesty.ADAPTIVE_COLLUDER:
            strategies[b] = resolve_target(scenario, b)
        else:
            strategies[b] = resolve_sabotage(scenario, b)
    return PredictorModel(
        dishonest_set=frozenset(scenario.dishonest_indices),
        strategies=strategies,
        vantage=vantage,
    )


def predict_sequence(
    model: PredictorModel,
    scenario: ValidatedScenario,
    ledger: Sequence[DigitRecord],
) -> list[dict[int, float]]:
    """Per-index predictive distribution over the combined digit.

    Point mass where the conspiracy's knowledge determines the digit (its own
    beacons' state, plus honest digits inside the vantage's past cone),
    uniform over the alphabet wherever an unheard honest digit enters.
    """
    n = scenario.beacon_count
    size = scenario.alphabet.size
    digits = {(rec.beacon, rec.stream_index): rec.digit for rec in ledger}
    uniform = {digit: 1.0 / size for digit in range(size)}
    out: list[dict[int, float]] = []

    for i in range(scenario.length):
        order = sorted(range(n), key=lambda b: (scenario.emission_event(b, i).time, b))
        known: dict[int, bool] = {}
        forcer = None
        for b in order:
            if b not in model.dishonest_set:
                known[b] = in_forward_cone(scenario.emission_event(b, i), model.vantage)
            elif scenario.beacons[b].honesty is Honesty.ADAPTIVE_COLLUDER:
                available = overheard_beacons(scenario, b, i)
                if len(available) == n - 1:
                    forcer = b
                    known[b] = all(known[o] for o in available)
                else:
                    known[b] = True  # fallback stream, internal state
            else:
                known[b] = True  # sabotaged stream, internal state

        if scenario.combiner is Combiner.XOR:
            if forcer is not None:
                dist = {model.strategies[forcer][i]: 1.0}
            elif all(known.values()):
                dist = {combine_xor([digits[(b, i)] for b in range(n)], size): 1.0}
            else:
                dist = uniform
        elif scenario.combiner is Combiner.TIME_SHARING:
            owner = i % n
            dist = {digits[(owner, i)]: 1.0} if known[owner] else uniform
        else:
            if all(known.values()):
                spec = scenario.hash_spec or HashSpec(output_bits=size.bit_length() - 1)
                dist = {combine_hash([digits[(b, i)] for b in range(n)], i, spec): 1.0}
            else:
                dist = uniform
        out.append(dist)
    return out


def best_guess_rate(distributions: Sequence[Mapping[int, float]]) -> float:
    """Mean probability of the per-index maximum-likelihood guess."""
    return sum(max(dist.values()) for dist in distributions) / len(distributions)


def log_loss_bits(distributions: Sequence[Mapping[int, float]], realized: Sequence[int]) -> float:
    """Total -log2 probability the predictor assigned to the realized digits."""
    total = 0.0
    for dist, digit in zip(distributions, realized):
        p = dist.get(digit, 0.0)
        if p <= 0.0:
            return math.inf
        total -= math.log2(p)
    return total


# --- Accomplice to a sabotaged beacon ----------------------------------------


def predict_sabotaged_stream(
    published: Sequence[int],
    size: int,
    params: ResolvedSabotage,
) -> list[Optional[int]]:
    """Predictions an accomplice can make from the published digits alone.

    Mirrors the saboteur's public state machine: the capture prefix keys the
    concealed generator, marker sightings announce reseed blocks, and the
    published reseed digits key the next phase. Returns one entry per digit:
    the predicted value during pseudorandom phases, None where the stream is
    true random (capture prefix and reseed blocks).
    """
    from collections import deque

    marker = tuple(int(b) for b in params.marker)
    window: deque[int] = deque(maxlen=len(marker))
    bits = digit_bit_width(size)

    def push(digit: int) -> None:
        for shift in range(bits - 1, -1, -1):
            window.append((digit >> shift) & 1)

    predictions: list[Optional[int]] = []
    captured: list[int] = []
    reseed_buffer: list[int] = []
    reseed_remaining = 0
    psrg: Optional[DigitStream] = None
    key: Optional[bytes] = None
    mode = "capturing"

    for digit in published:
        if mode == "capturing":
            predictions.append(None)
            captured.append(digit)
            push(digit)
            if len(captured) == params.capture_length:
                key = psrg_key_from_capture(size, captured)
                psrg = DigitStream(key, size)
                mode = "pseudorandom"
        elif mode == "pseudorandom":
            assert psrg is not None
            predictions.append(psrg.next_digit())
            push(digit)
            if len(window) == len(marker) and tuple(window) == marker:
                mode = "reseeding"
                reseed_remaining = params.reseed_length
                reseed_buffer = []
        else:
            predictions.append(None)
            push(digit)
            reseed_buffer.append(digit)
            reseed_remaining -= 1
            if reseed_remaining == 0:
                assert key is not None
                key = psrg_key_from_reseed(key, size, reseed_buffer)
                psrg = DigitStream(key, size)
                mode = "pseudorandom"
    return predictions
