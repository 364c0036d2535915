#!/usr/bin/env python3
"""Run every scripted adversary over a range of seeds and tally outcomes."""
import argparse
from collections import Counter

from sensorkey.simnet.adversary import SCENARIOS, run_attack


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()
    failures = 0
    for name in SCENARIOS:
        fired = Counter()
        bad = 0
        for seed in range(args.seeds):
            rep = run_attack(name, seed)
            bad += rep.compromised
            fired.update({k: v for k, v in rep.drops.items() if v})
        failures += bad
        print(f"{name:12s} compromised {bad}/{args.seeds}  counters {dict(sorted(fired.items()))}")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
