import json
import math

import pytest
from hypothesis import given, strategies as st

from oracles import COMM_ENERGY_MJ, PAIR_BYTES, RAM_16_12
from sensorkey.cost import (
    Energy,
    ProtocolCostProfile,
    Rate,
    RamModel,
    UnitError,
    accounting,
    comm_bytes,
    energy,
    format_accounting,
    load_constants,
    parse_constants,
    ram_estimate,
    sm_cost_per_node,
    sm_cost_per_pair,
)


def test_constants_load_and_are_positive():
    c = load_constants()
    assert c.weights["SM"].sm == 1
    assert c.weights["Hash"].per_bits == 80 and c.weights["Send"].per_bits == 160
    assert c.weights["SM"].energy.mJ == 11.15


def test_constants_round_trip():
    c = load_constants()
    again = parse_constants(json.loads(c.dumps()))
    assert again.reference_rows == c.reference_rows
    assert again.weights == c.weights and again.ram == c.ram
    assert again.reference_rows["NZMA"]["extra_ram"] == "23n+20d"
    assert len(c.reference_rows) == 8


def test_rate_units_are_enforced():
    per_op = Rate(1.0, Energy.of(11.15, "mJ"))
    per_80 = Rate(0.0185, Energy.of(59, "uJ"), 80)
    with pytest.raises(UnitError):
        per_op.sm_cost(1, bits=80)
    with pytest.raises(UnitError):
        per_80.sm_cost(1)
    assert per_80.sm_cost(1, bits=160) == pytest.approx(0.037)
    assert per_80.energy_cost(1, bits=80).microjoules == 59
    with pytest.raises(UnitError):
        Energy.of(1, "kWh")


def test_per_node_and_pair():
    assert sm_cost_per_node() == pytest.approx(8.25, abs=0.05)
    assert sm_cost_per_pair() == pytest.approx(16.49, abs=0.1)
    assert sm_cost_per_pair() == 2 * sm_cost_per_node()


def test_pure_scalar_multiplications():
    assert sm_cost_per_pair(pure=True) == 16
    assert ProtocolCostProfile().ops_per_node()["SM"] == 8


def test_comm_bytes():
    assert comm_bytes(1) == (226, 226, PAIR_BYTES)
    assert comm_bytes(0) == (103, 0, 452)
    assert comm_bytes(5) == (103 + 123 * 5, 226 * 5, 452)
    with pytest.raises(ValueError):
        comm_bytes(-1)


@given(st.integers(0, 200))
def test_comm_bytes_formula(d):
    send, recv, pair = comm_bytes(d)
    assert (send, recv, pair) == (103 + 123 * d, 226 * d, 452)


def test_energy():
    e = energy()
    assert e.computation.mJ == pytest.approx(183.85, abs=0.2)
    assert e.communication.mJ == pytest.approx(39.69, abs=0.1)
    assert math.isclose(e.communication.mJ, COMM_ENERGY_MJ)


def test_ram():
    assert ram_estimate(1, 1) == 4028
    assert ram_estimate(2, 1) == 4092
    assert ram_estimate(16, 12) == RAM_16_12 == 8112
    with pytest.raises(ValueError):
        ram_estimate(0, 1)


@given(st.integers(1, 100), st.integers(1, 100))
def test_ram_is_affine(d, q):
    m = RamModel()
    assert m.estimate(d + 1, q) - m.estimate(d, q) == 64
    assert m.estimate(d, q + 1) - m.estimate(d, q) == 284


def test_accounting_block_surfaces_model_gap():
    acc = accounting(16, 12)
    assert acc["ram_bytes"] == 8112 and acc["ram_headroom_bytes"] == 80
    assert acc["extra_ram_gap_per_neighbor"] == 4
    text = format_accounting(acc)
    assert "452 B" in text and "8112 B" in text and "4 B/neighbour gap" in text
