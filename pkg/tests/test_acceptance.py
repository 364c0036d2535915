"""Acceptance criteria, one test each.

Every test records a one-line PASS/FAIL verdict; the lines are printed in
the terminal summary (see conftest.py) and when the module is run directly.
"""
import time

import pytest

from sensorkey.certificates import cert_len, issue
from sensorkey.cost import comm_bytes, energy, ram_estimate, sm_cost_per_pair
from sensorkey.crypto import keygen
from sensorkey.ec import SECP160R1, TOY16
from sensorkey.engine import EngineConfig
from sensorkey.kgc import generate_network
from sensorkey.simnet.adversary import SCENARIOS, run_attack
from sensorkey.simnet.experiments import relative_gain, run_retransmission_sweep
from sensorkey.simnet.loss import LossModel
from sensorkey.simnet.network import Network, run_trial
from sensorkey.simnet.topology import build_topology, line_topology
from sensorkey.wire import MAX_PAYLOAD, new1_len, new2_len

VERDICTS: dict = {}


def record(n: int, title: str, ok: bool, detail: str) -> None:
    VERDICTS[n] = f"criterion {n} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    print(VERDICTS[n])
    assert ok, VERDICTS[n]


@pytest.fixture(scope="module")
def lossy_sweep():
    topo = build_topology("grid", 49)
    t = time.perf_counter()
    sweep = run_retransmission_sweep(topo, LossModel(0.95, 0.5), range(6), trials=10, seed=0, curve=TOY16)
    return sweep, time.perf_counter() - t


def test_1_byte_budgets():
    t = time.perf_counter()
    kgc, node = keygen(SECP160R1, seed="a1"), keygen(SECP160R1, seed="a2")
    cert = issue(1, node.Q, kgc.d, SECP160R1).to_bytes(SECP160R1)
    res = run_trial(line_topology([0, 30]), LossModel.lossless(), EngineConfig(retransmissions=0), seed=1, curve=SECP160R1)
    elapsed = time.perf_counter() - t
    got = (len(cert), new1_len(), new2_len(), res.bytes_on_air, res.packets_sent)
    ok = got == (82, 90, 110, 452, 4) and max(got[1:3]) <= MAX_PAYLOAD and elapsed < 1
    record(1, "byte budgets", ok, f"cert/New1/New2/pair/frames = {got}, {elapsed:.2f}s")


def test_2_cost_table_reproduction():
    t = time.perf_counter()
    sm = sm_cost_per_pair()
    comm = comm_bytes(1)[2]
    e = energy()
    elapsed = time.perf_counter() - t
    ok = (
        abs(sm - 16.49) <= 0.1
        and comm == 452
        and abs(e.computation.mJ - 183.85) <= 0.2
        and abs(e.communication.mJ - 39.69) <= 0.1
        and elapsed < 1
    )
    record(
        2, "cost table", ok,
        f"{sm:.4f} SM, {comm} B, {e.computation.mJ:.2f} mJ comp, {e.communication.mJ:.2f} mJ comm, {elapsed:.2f}s",
    )


def _keys_agree(net):
    for a, eng in net.engines.items():
        for b, key in eng.established().items():
            if net.engines[b].pairwise_key(a) not in (None, key):
                return False
    return True


def test_3_lossless_handshake_correctness():
    cases = [
        ("2 nodes", line_topology([0, 30]), TOY16),
        ("6 nodes", build_topology("random", 6, field=80, seed=3), TOY16),
        ("49 nodes", build_topology("grid", 49), TOY16),
        ("49 nodes secp160r1", build_topology("grid", 49), SECP160R1),
    ]
    parts, ok = [], True
    for name, topo, curve in cases:
        t = time.perf_counter()
        net = Network(topo, generate_network(topo.n, curve, master_seed=5), EngineConfig(), LossModel.lossless(), seed=5)
        net.run_stage(1)
        res = net.result()
        elapsed = time.perf_counter() - t
        limit = 30 if curve is TOY16 else 600
        good = res.in_range_pairs > 0 and res.ratio == 1.0 and res.key_mismatches == 0 and _keys_agree(net)
        ok &= good and elapsed < limit
        parts.append(f"{name} ratio {res.ratio:.2f} ({res.in_range_pairs} pairs, {elapsed:.1f}s)")
    record(3, "lossless correctness", ok, "; ".join(parts))


def test_4_instrumented_complexity():
    net = Network(line_topology([0, 30]), generate_network(2, SECP160R1, master_seed=9), EngineConfig(), LossModel.lossless(), seed=9)
    net.run_stage(1)
    per_node = [e.ops.sm for e in net.engines.values()]
    pair = sum(per_node)
    ok = per_node == [8, 8] and pair == 16 == sm_cost_per_pair(pure=True)
    record(4, "operation counts", ok, f"per node {per_node}, per pair {pair}")


def test_5_security_properties():
    failures = []
    counts = {s: 0 for s in SCENARIOS}
    for seed in range(100):
        rep = run_attack("mitm-relay", seed)
        counts["mitm-relay"] += 1
        if rep.compromised or rep.established_links or rep.drops["sig_fail"] == 0:
            failures.append(("mitm-relay", seed))
    for name in ("replay-new1", "replay-new2", "forge-cert", "tamper-new2"):
        for seed in range(20):
            rep = run_attack(name, seed)
            counts[name] += 1
            bad = rep.compromised or (1, 2) in rep.established_links
            if name == "forge-cert":
                bad |= rep.drops["cert_fail"] != 2 or bool(rep.established_links)
            if name in ("replay-new2", "tamper-new2"):
                bad |= rep.drops["sig_fail"] == 0
            if bad:
                failures.append((name, seed))
    total = sum(counts.values())
    record(5, "security suite", not failures, f"{total} scripted attacks, {len(failures)} compromised {failures[:3]}")


def test_6_retransmission_sweep(lossy_sweep):
    sweep, elapsed = lossy_sweep
    m = [r.mean for r in sweep.rows]
    g01, g12 = relative_gain(m[0], m[1]), relative_gain(m[1], m[2])
    monotone = all(b >= a for a, b in zip(m, m[1:]))
    ok = monotone and g01 > g12 and elapsed < 600
    means = " ".join(f"{x:.4f}" for x in m)
    record(6, "retransmission sweep", ok, f"means k=0..5 [{means}], gain 0-1 {100*g01:.2f}% vs 1-2 {100*g12:.2f}%, {elapsed:.1f}s")


def test_7_quiescence(lossy_sweep):
    sweep, _ = lossy_sweep
    reg = sum(r.residual_registered for _, _, r in sweep.trials)
    orph = sum(r.residual_orphans for _, _, r in sweep.trials)
    record(7, "quiescence", reg == 0 and orph == 0, f"{len(sweep.trials)} trials, {reg} half-open entries, {orph} orphans")


def test_8_ram_model():
    base = ram_estimate(1, 1)
    dn = ram_estimate(2, 1) - base
    dq = ram_estimate(1, 2) - base
    record(8, "RAM model", (base, dn, dq) == (4028, 64, 284), f"base {base}, +{dn}/neighbour, +{dq}/queue unit")


def test_9_determinism():
    topo = build_topology("grid", 25)
    prov = generate_network(25, TOY16, master_seed=4)
    a = run_trial(topo, LossModel(), seed=4, provisioned=prov)
    b = run_trial(topo, LossModel(), seed=4, provisioned=prov)
    csv_a = run_retransmission_sweep(topo, LossModel(), range(3), trials=3, seed=2).to_csv()
    csv_b = run_retransmission_sweep(topo, LossModel(), range(3), trials=3, seed=2).to_csv()
    ok = a == b and a.to_json() == b.to_json() and csv_a == csv_b
    record(9, "determinism", ok, f"TrialResult equal: {a == b}, CSV equal: {csv_a == csv_b}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
