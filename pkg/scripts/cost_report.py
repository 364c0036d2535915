#!/usr/bin/env python3
"""Model figures next to the published reference row, plus measured counts from a live handshake."""
from sensorkey.cost import accounting, load_constants
from sensorkey.ec import SECP160R1
from sensorkey.engine import EngineConfig
from sensorkey.simnet.loss import LossModel
from sensorkey.simnet.network import run_trial
from sensorkey.simnet.topology import line_topology

consts = load_constants()
ref = consts.reference_rows["this_protocol"]
acc = accounting(1, 1, consts)
rows = [
    ("computation (SM, pair)", acc["sm_per_pair"], ref["computation_sm"]),
    ("communication (B, pair)", acc["bytes_pair_total"], ref["communication_bytes"]),
    ("computation energy (mJ)", acc["energy_comp_mJ"], ref["energy_comp_mJ"]),
    ("communication energy (mJ)", acc["energy_comm_mJ"], ref["energy_comm_mJ"]),
]
print(f"{'quantity':28s} {'model':>10s} {'reference':>10s}")
for name, model, published in rows:
    print(f"{name:28s} {model:10.3f} {published:10.3f}")

res = run_trial(line_topology([0, 30]), LossModel.lossless(), EngineConfig(retransmissions=0), curve=SECP160R1)
print(f"measured on secp160r1: {res.sm_total} scalar multiplications, {res.bytes_on_air} bytes on air")

print("\nother protocols (reference only):")
for name, row in consts.reference_rows.items():
    if name != "this_protocol":
        print(f"  {name:9s} {row['computation_sm']:7.2f} SM {row['communication_bytes']:5d} B  extra RAM {row['extra_ram']}")
