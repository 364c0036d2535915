"""Analytical cost model: SM-normalised computation, radio bytes, energy, RAM.

Rates come in three flavours (per operation, per 80 bits, per 160 bits).
They are wrapped in :class:`Rate` so a bit-metered rate cannot be charged
without a bit length and a per-operation rate cannot silently take one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Optional

from sensorkey.crypto import OpCounter

ENERGY_UNITS_UJ = {"uJ": 1.0, "mJ": 1000.0, "J": 1_000_000.0}

NEW1_BODY = 90
NEW2_BODY = 110


class UnitError(ValueError):
    pass


@dataclass(frozen=True)
class Energy:
    microjoules: float

    @classmethod
    def of(cls, value: float, unit: str) -> "Energy":
        if unit not in ENERGY_UNITS_UJ:
            raise UnitError(f"unknown energy unit {unit!r}")
        return cls(value * ENERGY_UNITS_UJ[unit])

    @property
    def mJ(self) -> float:
        return self.microjoules / 1000.0

    def __add__(self, other: "Energy") -> "Energy":
        return Energy(self.microjoules + other.microjoules)

    def __mul__(self, k: float) -> "Energy":
        return Energy(self.microjoules * k)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Rate:
    """A per-operation or per-``per_bits`` cost figure."""

    sm: float
    energy: Energy
    per_bits: Optional[int] = None

    def units(self, count: float = 1, bits: Optional[int] = None) -> float:
        if self.per_bits is None:
            if bits is not None:
                raise UnitError("per-operation rate charged with a bit length")
            return float(count)
        if bits is None:
            raise UnitError(f"rate is per {self.per_bits} bits; a bit length is required")
        return count * bits / self.per_bits

    def sm_cost(self, count: float = 1, bits: Optional[int] = None) -> float:
        return self.sm * self.units(count, bits)

    def energy_cost(self, count: float = 1, bits: Optional[int] = None) -> Energy:
        return self.energy * self.units(count, bits)


@dataclass(frozen=True)
class OpWeights:
    rates: Mapping[str, Rate]

    def __post_init__(self):
        for name, r in self.rates.items():
            if r.sm <= 0 or r.energy.microjoules <= 0:
                raise ValueError(f"non-positive constant for {name}")

    def __getitem__(self, name: str) -> Rate:
        return self.rates[name]


@dataclass(frozen=True)
class RamModel:
    base: int = 4028
    per_neighbor: int = 64
    per_queue_unit: int = 284
    model_per_neighbor: int = 60
    platform: int = 8192

    def estimate(self, neighbors: int, queue_len: int) -> int:
        if neighbors < 1 or queue_len < 1:
            raise ValueError("neighbors and queue length must be >= 1")
        return self.base + self.per_neighbor * (neighbors - 1) + self.per_queue_unit * (queue_len - 1)


@dataclass(frozen=True)
class CostConstants:
    attachment: int
    weights: OpWeights
    ram: RamModel
    reference_rows: dict
    raw: dict = field(repr=False, compare=False)

    def dumps(self) -> str:
        return json.dumps(self.raw, indent=2, sort_keys=True)


def parse_constants(raw: dict) -> CostConstants:
    rates = {
        name: Rate(v["sm"], Energy.of(v["energy"]["value"], v["energy"]["unit"]), v["per_bits"])
        for name, v in raw["operations"].items()
    }
    r = raw["ram"]
    ram = RamModel(
        r["base_bytes"],
        r["per_neighbor_bytes"],
        r["per_queue_unit_bytes"],
        r["model_extra_per_neighbor_bytes"],
        r["platform_ram_bytes"],
    )
    return CostConstants(raw["attachment_bytes"], OpWeights(rates), ram, raw["reference_rows"], raw)


def load_constants() -> CostConstants:
    text = resources.files("sensorkey.data").joinpath("cost_constants.json").read_text()
    return parse_constants(json.loads(text))


# -- operation accounting ----------------------------------------------------

# Field-level operations each public-key primitive costs on 160-bit ECC.
PRIMITIVE_OPS = {
    "ecdsa_verify": {"SM": 2, "PA": 1, "Rev": 1, "Mod": 4, "M": 2, "Hash": 1},
    "ecdsa_sign": {"SM": 1, "Rev": 1, "Mod": 2, "M": 2, "Hash": 1},
    "ecies_encrypt": {"SM": 2, "KDF": 1, "Enc": 1, "MAC": 1},
    "ecies_decrypt": {"SM": 1, "KDF": 1, "Dec": 1, "MAC": 1},
}

# How a non-SM operation is priced: (rate name, bits metered per call).
# MAC and KDF run on SHA-1 and are priced at the hash rate. The MAC covers the
# 80-bit encrypted secret and the KDF emits 288 bits of key material. A
# signature digest is priced as one hash block. PA, Rev, Mod and M have no
# published rate and weigh nothing.
DEFAULT_METERING = {
    "Hash": ("Hash", 80),
    "MAC": ("Hash", 80),
    "KDF": ("Hash", 288),
    "Enc": ("Enc", 80),
    "Dec": ("Dec", 80),
}


@dataclass(frozen=True)
class ProtocolCostProfile:
    """Primitive calls for one two-party handshake."""

    primitives_per_pair: Mapping[str, int] = field(
        default_factory=lambda: {
            "ecdsa_verify": 4,  # two certificates, two New2 signatures
            "ecdsa_sign": 2,
            "ecies_encrypt": 2,
            "ecies_decrypt": 2,
        }
    )
    new1_body: int = NEW1_BODY
    new2_body: int = NEW2_BODY
    metering: Mapping[str, tuple] = field(default_factory=lambda: dict(DEFAULT_METERING))

    def ops_per_pair(self) -> dict:
        total: dict = {}
        for prim, calls in self.primitives_per_pair.items():
            for op, n in PRIMITIVE_OPS[prim].items():
                total[op] = total.get(op, 0) + n * calls
        return total

    def ops_per_node(self) -> dict:
        return {op: n / 2 for op, n in self.ops_per_pair().items()}


def sm_breakdown(profile: ProtocolCostProfile, weights: OpWeights, per: str = "node") -> dict:
    """SM-equivalents contributed by each operation class."""
    ops = profile.ops_per_node() if per == "node" else profile.ops_per_pair()
    out = {}
    for op, count in ops.items():
        if op == "SM":
            out[op] = weights["SM"].sm_cost(count)
        elif op in profile.metering:
            rate, bits = profile.metering[op]
            out[op] = weights[rate].sm_cost(count, bits)
        else:
            out[op] = 0.0
    return out


def sm_cost_per_node(
    profile: Optional[ProtocolCostProfile] = None,
    weights: Optional[OpWeights] = None,
    pure: bool = False,
) -> float:
    """SM-equivalents per node; ``pure`` zeroes every non-SM weight."""
    profile = profile or ProtocolCostProfile()
    weights = weights or load_constants().weights
    parts = sm_breakdown(profile, weights, "node")
    return parts["SM"] if pure else sum(parts.values())


def sm_cost_per_pair(
    profile: Optional[ProtocolCostProfile] = None,
    weights: Optional[OpWeights] = None,
    pure: bool = False,
) -> float:
    return 2 * sm_cost_per_node(profile, weights, pure)


def measured_pure_sm(counter: OpCounter) -> int:
    return counter.sm


def comm_bytes(d: int, attachment: int = 13, profile: Optional[ProtocolCostProfile] = None) -> tuple:
    """(send per node, receive per node, two-party total) for ``d`` neighbours."""
    if d < 0:
        raise ValueError("neighbour count must be >= 0")
    profile = profile or ProtocolCostProfile()
    new1 = profile.new1_body + attachment
    new2 = profile.new2_body + attachment
    return new1 + new2 * d, (new1 + new2) * d, 2 * (new1 + new2)


@dataclass(frozen=True)
class EnergyReport:
    computation: Energy
    communication: Energy


def energy(
    profile: Optional[ProtocolCostProfile] = None,
    constants: Optional[CostConstants] = None,
) -> EnergyReport:
    """Two-party energy: SM-equivalents at the SM energy rate, plus every
    on-air byte paid once to send and once to receive."""
    profile = profile or ProtocolCostProfile()
    constants = constants or load_constants()
    w = constants.weights
    comp = w["SM"].energy_cost(sm_cost_per_pair(profile, w))
    bits = comm_bytes(1, constants.attachment, profile)[2] * 8
    comm = w["Send"].energy_cost(1, bits) + w["Receive"].energy_cost(1, bits)
    return EnergyReport(comp, comm)


def ram_estimate(neighbors: int, queue_len: int, model: Optional[RamModel] = None) -> int:
    return (model or load_constants().ram).estimate(neighbors, queue_len)


def accounting(neighbors: int, queue_len: int, constants: Optional[CostConstants] = None) -> dict:
    """Everything the analysis report prints, as plain data."""
    c = constants or load_constants()
    profile = ProtocolCostProfile()
    send, recv, pair = comm_bytes(neighbors, c.attachment, profile)
    e = energy(profile, c)
    ram = c.ram.estimate(neighbors, queue_len)
    per_node = sm_cost_per_node(profile, c.weights)
    return {
        "neighbors": neighbors,
        "queue_len": queue_len,
        "ops_per_node": profile.ops_per_node(),
        "sm_breakdown_per_node": sm_breakdown(profile, c.weights),
        "sm_per_node": per_node,
        "sm_per_pair": 2 * per_node,
        "sm_pure_per_pair": sm_cost_per_pair(profile, c.weights, pure=True),
        "sm_per_node_with_neighbors": neighbors * per_node,
        "bytes_new1_frame": profile.new1_body + c.attachment,
        "bytes_new2_frame": profile.new2_body + c.attachment,
        "bytes_send_per_node": send,
        "bytes_receive_per_node": recv,
        "bytes_pair_total": pair,
        "energy_comp_mJ": e.computation.mJ,
        "energy_comm_mJ": e.communication.mJ,
        "ram_bytes": ram,
        "ram_platform_bytes": c.ram.platform,
        "ram_headroom_bytes": c.ram.platform - ram,
        "extra_ram_model_bytes": c.ram.model_per_neighbor * neighbors,
        "extra_ram_measured_bytes": c.ram.per_neighbor * neighbors,
        "extra_ram_gap_per_neighbor": c.ram.per_neighbor - c.ram.model_per_neighbor,
    }


def format_accounting(acc: dict) -> str:
    ops = ", ".join(f"{n:g} {op}" for op, n in acc["ops_per_node"].items())
    parts = ", ".join(f"{op} {v:.4f}" for op, v in acc["sm_breakdown_per_node"].items() if v)
    d, q = acc["neighbors"], acc["queue_len"]
    lines = [
        "computation",
        f"  operations per node (one partner): {ops}",
        f"  SM-equivalents by class: {parts}",
        f"  per node: {acc['sm_per_node']:.4f} SM   per pair: {acc['sm_per_pair']:.4f} SM",
        f"  scalar multiplications only, per pair: {acc['sm_pure_per_pair']:g}",
        f"  per node with d={d}: {acc['sm_per_node_with_neighbors']:.4f} SM",
        "communication",
        f"  New1 frame {acc['bytes_new1_frame']} B, New2 frame {acc['bytes_new2_frame']} B",
        f"  per node with d={d}: send {acc['bytes_send_per_node']} B, receive {acc['bytes_receive_per_node']} B",
        f"  two-party total: {acc['bytes_pair_total']} B",
        "energy (two parties)",
        f"  computation: {acc['energy_comp_mJ']:.2f} mJ",
        f"  communication: {acc['energy_comm_mJ']:.2f} mJ",
        "memory",
        f"  RAM for {d} neighbours, queue {q}: {acc['ram_bytes']} B"
        f" ({acc['ram_headroom_bytes']:+d} B against {acc['ram_platform_bytes']} B platform RAM, before OS overhead)",
        f"  extra RAM per neighbour: model {acc['extra_ram_model_bytes']} B vs measured"
        f" {acc['extra_ram_measured_bytes']} B ({acc['extra_ram_gap_per_neighbor']} B/neighbour gap)",
    ]
    return "\n".join(lines)
