import math
import random

import pytest
from scipy.stats import binomtest

from beacon_forge.adversary import (
    AttackBudget,
    accomplice_model,
    adaptive_target_attack,
    best_guess_rate,
    bias_attack_report,
    budgeted_force_bits,
    find_bias_string,
    log_loss_bits,
    predict_sequence,
    run_adaptive_attack_trials,
    run_budgeted_force_trials,
)
from beacon_forge.beacons import run_emission_schedule
from beacon_forge.combiners import combine_hash, resultant_stream
from beacon_forge.core import Combiner, HashSpec, Honesty
from beacon_forge.errors import MaskWiderThanOutput, WidthTooLarge
from beacon_forge.rng import derive_seed
from beacon_forge.spacetime import SpacetimeEvent, in_predictability_gap

from conftest import build_scenario, spacelike_scenario, timelike_scenario

FAR_PAST = SpacetimeEvent(0.0, -1e9)


def exhaustive_bias_oracle(spec, bit_position, forced_value, index=0):
    # independent scan, including the smallest-x tie break
    d = spec.output_bits
    best = None
    for x in range(1 << d):
        count = 0
        for y in range(1 << d):
            bit = (combine_hash((x, y), index, spec) >> (d - 1 - bit_position)) & 1
            if bit != forced_value:
                count += 1
        if best is None or count < best[1]:
            best = (x, count)
    return best


# --- bias attack -----------------------------------------------------------------


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("forced", [0, 1])
def test_bias_search_matches_oracle(d, forced):
    spec = HashSpec(output_bits=d)
    got = find_bias_string(spec, 0, forced)
    assert (got.broadcast_digit, got.residual_count) == exhaustive_bias_oracle(spec, 0, forced)


def test_bias_search_other_bit_positions():
    spec = HashSpec(output_bits=4)
    for position in range(4):
        got = find_bias_string(spec, position, 0)
        assert (got.broadcast_digit, got.residual_count) == exhaustive_bias_oracle(spec, position, 0)


def test_bias_width_cap():
    with pytest.raises(WidthTooLarge):
        find_bias_string(HashSpec(output_bits=17), 0, 0)
    with pytest.raises(WidthTooLarge):
        find_bias_string(HashSpec(output_bits=9), 0, 0, max_width=8)


def test_bias_d1_truth_table():
    spec = HashSpec(output_bits=1)
    table = {(x, y): combine_hash((x, y), 0, spec) for x in (0, 1) for y in (0, 1)}
    got = find_bias_string(spec, 0, 1)
    counts = {x: sum(1 for y in (0, 1) if table[(x, y)] != 1) for x in (0, 1)}
    assert got.residual_count == min(counts.values()) and got.residual_count in {0, 1, 2}
    assert counts[got.broadcast_digit] == got.residual_count


def test_bias_residuals_sum_and_half_bounds():
    # pigeonhole: the two forced-value residuals sum to at most 2^d; for this
    # hash both minima also sit at or below 2^(d-1) at every tested width
    for d in (1, 2, 3, 4, 6):
        spec = HashSpec(output_bits=d)
        r0 = find_bias_string(spec, 0, 0).residual_count
        r1 = find_bias_string(spec, 0, 1).residual_count
        assert r0 + r1 <= 1 << d
        assert r0 <= 1 << (d - 1) and r1 <= 1 << (d - 1)


def test_bias_report_schema_values():
    report = bias_attack_report(HashSpec(output_bits=4))
    assert report.attack == "bias" and report.trials == 1
    assert report.budget == report.x_values_sampled == 256
    assert report.success_rate == 1 - report.mean_distance


# --- adaptive target attack ---------------------------------------------------------


def test_adaptive_full_budget_is_true_argmin():
    spec = HashSpec(output_bits=6)
    y, z = 11, 40
    got = adaptive_target_attack(spec, y, z, AttackBudget(64))
    dists = [(combine_hash((x, y), 0, spec) ^ z).bit_count() for x in range(64)]
    assert got.achieved_distance == min(dists)
    assert got.chosen_digit == dists.index(min(dists))  # smallest-x tie break


def test_adaptive_hits_reachable_target():
    spec = HashSpec(output_bits=8)
    y = 77
    z = combine_hash((123, y), 0, spec)
    got = adaptive_target_attack(spec, y, z, AttackBudget(256))
    assert got.achieved_distance == 0
    assert combine_hash((got.chosen_digit, y), 0, spec) == z


def test_adaptive_partial_budget_never_beats_its_sample():
    spec = HashSpec(output_bits=8)
    rng = random.Random(3)
    sample_rng = random.Random(3)
    got = adaptive_target_attack(spec, 5, 9, AttackBudget(32), rng=rng)
    sampled = sample_rng.sample(range(256), 32)
    dists = {x: (combine_hash((x, 5), 0, spec) ^ 9).bit_count() for x in sampled}
    assert got.achieved_distance == min(dists.values())
    assert dists[got.chosen_digit] == got.achieved_distance


def test_adaptive_partial_budget_requires_rng():
    with pytest.raises(ValueError):
        adaptive_target_attack(HashSpec(output_bits=8), 0, 0, AttackBudget(16))


def test_budget_monotonicity_sign_test():
    # paired trials: larger budgets should not increase the achieved distance
    # in expectation (one-sided sign test at alpha = 0.01)
    spec = HashSpec(output_bits=8)
    better = worse = 0
    for t in range(1000):
        rng = random.Random(derive_seed(7, "mono", t))
        y, z = rng.randrange(256), rng.randrange(256)
        small = adaptive_target_attack(
            spec, y, z, AttackBudget(32), index=t,
            rng=random.Random(derive_seed(7, "mono-small", t)),
        )
        big = adaptive_target_attack(
            spec, y, z, AttackBudget(128), index=t,
            rng=random.Random(derive_seed(7, "mono-big", t)),
        )
        if big.achieved_distance < small.achieved_distance:
            better += 1
        elif big.achieved_distance > small.achieved_distance:
            worse += 1
    assert binomtest(worse, better + worse, 0.5, alternative="less").pvalue < 0.01


def test_adaptive_trials_parallel_execution_matches_sequential():
    spec = HashSpec(output_bits=6)
    sequential = run_adaptive_attack_trials(spec, AttackBudget(64), 60, seed=9, workers=1)
    parallel = run_adaptive_attack_trials(spec, AttackBudget(64), 60, seed=9, workers=4)
    assert sequential == parallel


# --- budgeted bit forcing ---------------------------------------------------------


def test_budgeted_empty_mask_always_succeeds():
    spec = HashSpec(output_bits=8)
    assert budgeted_force_bits(spec, 3, (), (), random.Random(0)) is not None


def test_budgeted_success_pins_masked_bits():
    spec = HashSpec(output_bits=8)
    mask, wanted = (0, 2, 5), (1, 0, 1)
    hits = 0
    for trial in range(50):
        x = budgeted_force_bits(spec, trial, mask, wanted, random.Random(trial), index=trial)
        if x is not None:
            hits += 1
            value = combine_hash((x, trial), trial, spec)
            assert all(((value >> (7 - p)) & 1) == w for p, w in zip(mask, wanted))
    assert hits > 0


def test_budgeted_mask_validation():
    spec = HashSpec(output_bits=4)
    rng = random.Random(0)
    with pytest.raises(MaskWiderThanOutput):
        budgeted_force_bits(spec, 0, (0, 1, 2, 3, 3), (0,) * 5, rng)
    with pytest.raises(MaskWiderThanOutput):
        budgeted_force_bits(spec, 0, (4,), (0,), rng)
    with pytest.raises(MaskWiderThanOutput):
        budgeted_force_bits(spec, 0, (0, 0), (0, 0), rng)


def test_budgeted_full_mask_agrees_with_adaptive_exact_hits():
    # with m = d the budget covers every x exactly once, so success is
    # equivalent to the adaptive attack finding an exact hit
    d = 5
    spec = HashSpec(output_bits=d)
    for trial in range(200):
        rng = random.Random(derive_seed(11, "consistency", trial))
        y, z = rng.randrange(1 << d), rng.randrange(1 << d)
        mask = tuple(range(d))
        wanted = tuple((z >> (d - 1 - p)) & 1 for p in mask)
        found = budgeted_force_bits(spec, y, mask, wanted, random.Random(trial), index=trial)
        exact = adaptive_target_attack(spec, y, z, AttackBudget(1 << d), index=trial)
        assert (found is not None) == (exact.achieved_distance == 0)


def test_budgeted_trials_report_counts_evaluations():
    spec = HashSpec(output_bits=8)
    report = run_budgeted_force_trials(spec, (0, 1), 40, seed=3)
    assert report.attack == "budgeted" and report.budget == 4
    assert 40 <= report.x_values_sampled <= 40 * 4
    assert 0.0 <= report.success_rate <= 1.0


# --- conspiracy predictor ---------------------------------------------------------


def test_predictor_time_sharing_split():
    scn = spacelike_scenario(
        [Honesty.SABOTAGED_PSRG, Honesty.HONEST],
        size=4, length=200, combiner=Combiner.TIME_SHARING,
    )
    ledger = run_emission_schedule(scn)
    dists = predict_sequence(accomplice_model(scn, FAR_PAST), scn, ledger)
    for i, dist in enumerate(dists):
        assert abs(sum(dist.values()) - 1.0) < 1e-12
        if i % 2 == 0:
            assert dist == {ledger_digit(ledger, 0, i): 1.0}
        else:
            assert dist == {v: 0.25 for v in range(4)}
    assert best_guess_rate(dists) == (1 + 1 / 4) / 2


def ledger_digit(ledger, beacon, index):
    return next(r.digit for r in ledger if r.beacon == beacon and r.stream_index == index)


def test_predictor_spacelike_xor_is_uniform():
    scn = spacelike_scenario([Honesty.HONEST, Honesty.ADAPTIVE_COLLUDER], size=2, length=64)
    ledger = run_emission_schedule(scn)
    dists = predict_sequence(accomplice_model(scn, FAR_PAST), scn, ledger)
    assert all(dist == {0: 0.5, 1: 0.5} for dist in dists)
    assert best_guess_rate(dists) == 0.5


def test_predictor_all_dishonest_is_point_mass():
    scn = spacelike_scenario([Honesty.SABOTAGED_PSRG, Honesty.SABOTAGED_PSRG], size=2, length=32)
    ledger = run_emission_schedule(scn)
    resultant = resultant_stream(scn, ledger)
    dists = predict_sequence(accomplice_model(scn, FAR_PAST), scn, ledger)
    assert dists == [{digit: 1.0} for digit in resultant]


def test_predictor_forced_xor_known_everywhere():
    scn = timelike_scenario(
        [Honesty.HONEST, Honesty.HONEST, Honesty.ADAPTIVE_COLLUDER], size=2, length=64
    )
    ledger = run_emission_schedule(scn)
    resultant = resultant_stream(scn, ledger)
    dists = predict_sequence(accomplice_model(scn, FAR_PAST), scn, ledger)
    assert dists == [{digit: 1.0} for digit in resultant]


def test_predictor_vantage_inside_gap_sees_resultant():
    scn = build_scenario(
        [Honesty.HONEST, Honesty.SABOTAGED_PSRG], positions=[0.0, 10.0], length=1
    )
    ledger = run_emission_schedule(scn)
    vantage = SpacetimeEvent(0.0, 1.0)
    assert in_predictability_gap(scn, vantage, 0)
    dists = predict_sequence(accomplice_model(scn, vantage), scn, ledger)
    assert dists[0] == {resultant_stream(scn, ledger)[0]: 1.0}


def test_predictor_hash_needs_every_input():
    scn = build_scenario(
        [Honesty.HONEST, Honesty.SABOTAGED_PSRG],
        size=16, length=8, combiner=Combiner.HASH, positions=[0.0, 10.0],
    )
    ledger = run_emission_schedule(scn)
    far = predict_sequence(accomplice_model(scn, FAR_PAST), scn, ledger)
    assert all(dist == {v: 1 / 16 for v in range(16)} for dist in far)
    omniscient = predict_sequence(
        accomplice_model(scn, SpacetimeEvent(5.0, 1e9)), scn, ledger
    )
    assert omniscient == [{digit: 1.0} for digit in resultant_stream(scn, ledger)]


def test_predictor_calibration_log_loss():
    scn = spacelike_scenario(
        [Honesty.SABOTAGED_PSRG, Honesty.HONEST],
        size=2, length=10_000, combiner=Combiner.TIME_SHARING,
    )
    ledger = run_emission_schedule(scn)
    dists = predict_sequence(accomplice_model(scn, FAR_PAST), scn, ledger)
    realized = resultant_stream(scn, ledger)
    # point masses are exactly right, uniform indices cost exactly one bit each
    assert log_loss_bits(dists, realized) == 5000.0
    guesses = [min(d, key=lambda v: (-d[v], v)) for d in dists]
    correct = sum(1 for g, r in zip(guesses, realized) if g == r)
    sigma = math.sqrt(5000 * 0.25)
    assert abs(correct - 7500) <= 3 * sigma
