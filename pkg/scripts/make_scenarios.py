#!/usr/bin/env python3
"""Regenerate the example scenario files in scenarios/.

Usage: python scripts/make_scenarios.py [--out scenarios]
"""

import argparse
import json
from pathlib import Path

SCENARIOS = {
    # honest + seed-capturing saboteur, far apart: spacelike XOR keeps one
    # full bit of min entropy per digit
    "spacelike_xor.json": {
        "alphabet": 2,
        "beacons": [
            {"position": 0.0, "phase_offset": 0.0, "period": 1.0, "honesty": "honest"},
            {
                "position": 1000.0,
                "phase_offset": 0.0,
                "period": 1.0,
                "honesty": "sabotaged_psrg",
                "strategy_params": {"capture_length": 256, "reseed_length": 200},
            },
        ],
        "length": 8,
        "combiner": "xor",
        "master_seed": 7,
    },
    # a colluder emitting last from the same site overhears everyone and
    # forces the XOR resultant onto its (seed-derived) target sequence
    "timelike_forcing.json": {
        "alphabet": 2,
        "beacons": [
            {"position": 0.0, "phase_offset": 0.0, "period": 1.0, "honesty": "honest"},
            {"position": 0.0, "phase_offset": 0.05, "period": 1.0, "honesty": "honest"},
            {"position": 0.0, "phase_offset": 0.9, "period": 1.0, "honesty": "adaptive_colluder"},
        ],
        "length": 64,
        "combiner": "xor",
        "master_seed": 11,
    },
    # two honest byte beacons combined through a truncated digest; input for
    # the attack-hash command
    "hash_pair.json": {
        "alphabet": 256,
        "beacons": [
            {"position": 0.0, "phase_offset": 0.0, "period": 1.0, "honesty": "honest"},
            {"position": 500.0, "phase_offset": 0.0, "period": 1.0, "honesty": "honest"},
        ],
        "length": 8,
        "combiner": "hash",
        "hash_spec": {"algorithm": "sha256", "output_bits": 8},
        "master_seed": 13,
    },
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "scenarios")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, data in SCENARIOS.items():
        path = args.out / name
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
