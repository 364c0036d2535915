"""Command-line entry points: kgc, simulate, attack, analyze."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from sensorkey.cost import accounting, format_accounting
from sensorkey.ec import CURVES, get_curve
from sensorkey.engine import EngineConfig
from sensorkey.kgc import generate_network, write_network
from sensorkey.simnet.adversary import SCENARIOS, run_attack
from sensorkey.simnet.experiments import relative_gain, run_retransmission_sweep
from sensorkey.simnet.loss import LossModel
from sensorkey.simnet.topology import KINDS, build_topology


def parse_k_range(text: str) -> list[int]:
    """``0..5`` (inclusive), ``0,1,3`` or a single integer."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    try:
        values = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad retransmission list {text!r}") from None
    if any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("retransmission counts must be >= 0")
    return values


def _loss(text: str) -> LossModel:
    try:
        return LossModel.parse(text)
    except (ValueError, TypeError) as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def cmd_kgc(args) -> int:
    curve = get_curve(args.curve)
    net = generate_network(args.nodes, curve, master_seed=args.seed, compressed=args.compressed)
    out = Path(args.out)
    write_network(net, out, kgc_key_path=args.kgc_key)
    print(f"wrote {len(net.bundles)} bundles and manifest.json to {out}")
    if args.kgc_key:
        print(f"KGC private key written to {args.kgc_key}; keep it offline")
    return 0


def cmd_simulate(args) -> int:
    topo = build_topology(args.topology, args.nodes, args.field, args.spacing, args.radius, seed=args.seed)
    config = EngineConfig(
        max_neighbors=args.max_neighbors,
        queue_capacity=args.queue,
        retx_interval=args.interval,
    )
    lo, hi, avg = topo.degree_stats()
    print(f"{topo.kind} n={topo.n} radius={topo.radius:g} m, degree min/avg/max {lo}/{avg:.2f}/{hi}")
    sweep = run_retransmission_sweep(
        topo, args.loss, args.retx, args.trials, args.seed, config, get_curve(args.curve)
    )
    print(f"{'k':>3} {'mean':>9} {'stddev':>9} {'gain':>9}")
    prev = None
    for row in sweep.rows:
        gain = "" if prev is None else f"{100 * relative_gain(prev, row.mean):8.2f}%"
        print(f"{row.k:>3} {row.mean:9.4f} {row.stddev:9.4f} {gain:>9}")
        prev = row.mean
    text = sweep.to_csv()
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {len(sweep.trials)} trial rows to {args.out}")
    return 0


def cmd_attack(args) -> int:
    scenarios = SCENARIOS if args.scenario == "all" else (args.scenario,)
    ok = True
    for i, name in enumerate(scenarios):
        report = run_attack(name, args.seed, get_curve(args.curve))
        if i:
            print()
        print(report.summary())
        ok &= not report.compromised
    return 0 if ok else 1


def cmd_analyze(args) -> int:
    acc = accounting(args.neighbors, args.queue)
    if args.json:
        print(json.dumps(acc, indent=2, sort_keys=True))
    elif args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "value"])
        for key, value in acc.items():
            if isinstance(value, dict):
                for sub, v in value.items():
                    w.writerow([f"{key}.{sub}", v])
            else:
                w.writerow([key, value])
        sys.stdout.write(buf.getvalue())
    else:
        print(format_accounting(acc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sensorkey", description="Authenticated key establishment toolkit for sensor networks")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    kgc = sub.add_parser("kgc", help="offline key generation centre")
    kgc_sub = kgc.add_subparsers(dest="kgc_command", required=True)
    gen = kgc_sub.add_parser("generate", help="provision a network")
    gen.add_argument("--nodes", type=int, required=True)
    gen.add_argument("--curve", choices=sorted(CURVES), default="secp160r1")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--compressed", action="store_true", help="compressed points in certificates")
    gen.add_argument("--kgc-key", help="also write the KGC private key to this path")
    gen.set_defaults(func=cmd_kgc)

    sim = sub.add_parser("simulate", help="retransmission sweep")
    sim.add_argument("--topology", choices=KINDS, default="grid")
    sim.add_argument("--nodes", type=int, default=49)
    sim.add_argument("--field", type=float, default=750.0)
    sim.add_argument("--spacing", type=float, default=25.0)
    sim.add_argument("--radius", type=float, default=50.0)
    sim.add_argument("--loss", type=_loss, default=LossModel())
    sim.add_argument("--retx", type=parse_k_range, default=list(range(6)))
    sim.add_argument("--trials", type=int, default=10)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--curve", choices=sorted(CURVES), default="toy16")
    sim.add_argument("--max-neighbors", type=int, default=16)
    sim.add_argument("--queue", type=int, default=12)
    sim.add_argument("--interval", type=int, default=10, help="New1 retransmission interval in ticks")
    sim.add_argument("--out", help="CSV output path")
    sim.set_defaults(func=cmd_simulate)

    atk = sub.add_parser("attack", help="run a scripted adversary")
    atk.add_argument("--scenario", choices=(*SCENARIOS, "all"), required=True)
    atk.add_argument("--seed", type=int, default=0)
    atk.add_argument("--curve", choices=sorted(CURVES), default="secp160r1")
    atk.set_defaults(func=cmd_attack)

    ana = sub.add_parser("analyze", help="cost, traffic, energy and RAM accounting")
    ana.add_argument("--neighbors", type=int, default=1)
    ana.add_argument("--queue", type=int, default=1)
    fmt = ana.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    ana.set_defaults(func=cmd_analyze)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
