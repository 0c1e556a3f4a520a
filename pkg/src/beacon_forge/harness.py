"""Command-line front end: scenario ingestion, experiments, report files.

Commands (all take --scenario, --out, and optional --seed/--trials):

* run: simulate the scenario and write the emission ledger (ledger.csv).
* table1: min-entropy summary of both protocols for the scenario's n and
  number of dishonest beacons (table1.csv, units of log2 of alphabet size).
* attack-hash: the bias, adaptive-target, and budgeted bit-forcing attacks
  against the scenario's hash spec (attack.json).
* entropy: exact per-character entropies of the scenario's combined stream
  (entropy.json).
* predictability-map: region labels over a default (x, t) grid for stream
  index 0 (predictability.csv).

Exit codes: 0 success, 2 configuration/parse failure, 3 invalid scenario,
4 enumeration too large. All outputs are byte-deterministic for a given
effective seed (--seed overrides the scenario's master seed).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import adversary, entropy
from .beacons import run_emission_schedule, write_ledger_csv
from .core import Combiner, Scenario, ValidatedScenario, load_scenario, validate_scenario
from .errors import EnumerationTooLarge, ScenarioError
from .spacetime import SpacetimeEvent, can_compute_resultant, in_predictability_gap

LABEL_PUBLIC = "PublicComputable"
LABEL_ACCOMPLICE = "AccompliceOnly"
LABEL_UNKNOWN = "Unknown"

DEFAULT_TRIALS = 1000
_GRID_POINTS = 41


@dataclass(frozen=True)
class ExperimentConfig:
    """One CLI invocation: scenario file, command, output directory, knobs."""

    scenario_path: Path
    command: str
    output_dir: Path
    seed_override: Optional[int] = None
    trials: int = DEFAULT_TRIALS

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


@dataclass(frozen=True)
class Grid:
    """Rectangular (x, t) grid for region maps."""

    xs: tuple[float, ...]
    ts: tuple[float, ...]

    @classmethod
    def linspace(cls, x_min: float, x_max: float, t_min: float, t_max: float,
                 points: int = _GRID_POINTS) -> "Grid":
        def axis(lo: float, hi: float) -> tuple[float, ...]:
            if points == 1:
                return (lo,)
            step = (hi - lo) / (points - 1)
            return tuple(lo + j * step for j in range(points))

        return cls(xs=axis(x_min, x_max), ts=axis(t_min, t_max))


def default_grid(scenario: ValidatedScenario) -> Grid:
    """Grid spanning the beacon positions with room for the forward cones."""
    positions = [b.position for b in scenario.beacons]
    p_min, p_max = min(positions), max(positions)
    span = max(p_max - p_min, 1.0)
    phases = [b.phase_offset for b in scenario.beacons]
    t_min, t_max = min(phases), max(phases)
    return Grid.linspace(p_min - span, p_max + span, t_min - span / 2, t_max + 2 * span)


def predictability_map(
    scenario: ValidatedScenario, grid: Grid, index: int
) -> list[tuple[float, float, str]]:
    """Label each grid point by who can evaluate the combined digit there."""
    has_dishonest = bool(scenario.dishonest_indices)
    rows = []
    for x in grid.xs:
        for t in grid.ts:
            observer = SpacetimeEvent(x, t)
            if can_compute_resultant(scenario, observer, index):
                label = LABEL_PUBLIC
            elif has_dishonest and in_predictability_gap(scenario, observer, index):
                label = LABEL_ACCOMPLICE
            else:
                label = LABEL_UNKNOWN
            rows.append((x, t, label))
    return rows


def _write_json(payload, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_table1_csv(table: dict[str, dict[str, float]], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["separation", "xor", "time_sharing"])
        for separation in ("spacelike", "timelike"):
            row = table[separation]
            writer.writerow([separation, repr(row["xor"]), repr(row["time_sharing"])])


def _write_predictability_csv(rows: Sequence[tuple[float, float, str]], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "t", "label"])
        for x, t, label in rows:
            writer.writerow([repr(x), repr(t), label])


def _effective_scenario(config: ExperimentConfig) -> ValidatedScenario:
    raw: Scenario = load_scenario(config.scenario_path)
    if config.seed_override is not None:
        raw = dataclasses.replace(raw, master_seed=config.seed_override)
    return validate_scenario(raw)


def run_experiment(config: ExperimentConfig) -> list[Path]:
    """Execute one command; returns the report files written."""
    scenario = _effective_scenario(config)
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    if config.command == "run":
        ledger = run_emission_schedule(scenario)
        path = out_dir / "ledger.csv"
        write_ledger_csv(ledger, path)
        return [path]

    if config.command == "table1":
        table = entropy.min_entropy_table(scenario.beacon_count, len(scenario.dishonest_indices))
        path = out_dir / "table1.csv"
        _write_table1_csv(table, path)
        return [path]

    if config.command == "attack-hash":
        if scenario.combiner is not Combiner.HASH or scenario.hash_spec is None:
            raise ScenarioError("attack-hash requires a scenario with the hash combiner")
        spec = scenario.hash_spec
        seed = scenario.master_seed
        d = spec.output_bits
        mask = tuple(range(min(4, d)))
        reports = [
            adversary.bias_attack_report(spec),
            adversary.run_adaptive_attack_trials(
                spec, adversary.AttackBudget(1 << d), config.trials, seed
            ),
            adversary.run_budgeted_force_trials(spec, mask, config.trials, seed),
        ]
        path = out_dir / "attack.json"
        _write_json([r.to_dict() for r in reports], path)
        return [path]

    if config.command == "entropy":
        protocol = entropy.Protocol.from_combiner(scenario.combiner)
        model = entropy.SabotageModel.from_scenario(scenario)
        report = entropy.entropy_report(scenario, protocol, model)
        path = out_dir / "entropy.json"
        _write_json(report.to_dict(), path)
        return [path]

    if config.command == "predictability-map":
        rows = predictability_map(scenario, default_grid(scenario), index=0)
        path = out_dir / "predictability.csv"
        _write_predictability_csv(rows, path)
        return [path]

    raise ValueError(f"unknown command {config.command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beacon-forge",
        description="Simulate multi-beacon trust amplification and analyze the results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "run": "simulate the scenario and write the emission ledger",
        "table1": "write the min-entropy summary table for both protocols",
        "attack-hash": "run the hash-combiner attack suite",
        "entropy": "exact entropies of the scenario's combined stream",
        "predictability-map": "label spacetime regions by who can compute the resultant",
    }
    for name, help_text in helps.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--scenario", required=True, type=Path, help="scenario JSON file")
        cmd.add_argument("--out", required=True, type=Path, help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the master seed")
        cmd.add_argument("--trials", type=int, default=DEFAULT_TRIALS,
                         help="Monte Carlo repetition count (attack-hash)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ExperimentConfig(
            scenario_path=args.scenario,
            command=args.command,
            output_dir=args.out,
            seed_override=args.seed,
            trials=args.trials,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        run_experiment(config)
    except EnumerationTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
