"""Deterministic simulator and analysis toolkit for multi-beacon trust amplification."""

from .core import (
    AdaptiveParams,
    Alphabet,
    BeaconSpec,
    Combiner,
    DigitRecord,
    HashSpec,
    Honesty,
    SabotageParams,
    Scenario,
    ValidatedScenario,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)
from .spacetime import (
    IntervalKind,
    SpacetimeEvent,
    all_pairs_spacelike,
    availability_time,
    can_compute_resultant,
    classify_interval,
    in_forward_cone,
    in_predictability_gap,
    past_cone_digits,
)
from .beacons import run_emission_schedule, write_ledger_csv
from .combiners import combine_hash, combine_time_sharing, combine_xor, resultant_stream
from .adversary import (
    AttackBudget,
    PredictorModel,
    accomplice_model,
    adaptive_target_attack,
    budgeted_force_bits,
    find_bias_string,
    predict_sabotaged_stream,
    predict_sequence,
)
from .entropy import (
    EntropyReport,
    Protocol,
    SabotageModel,
    SequenceDistribution,
    entropy_report,
    min_entropy_exact,
    min_entropy_table,
    resultant_distribution,
    shannon_entropy,
    single_beacon_min_entropy,
)
from .harness import ExperimentConfig, Grid, predictability_map, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
