"""Offline key generation center: provisions every node before deployment.

A bundle file is ``b"TAKE" | version:1`` followed by six length-prefixed
fields (``[len:2][bytes]``) in this order: curve name, node id, private
scalar, public key, certificate, KGC public key.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from sensorkey.certificates import Certificate, cert_len, issue, verify_cert
from sensorkey.crypto import DecodeError, KeyPair, Seed, derive_bytes, keygen, seed_bytes
from sensorkey.ec import SECP160R1, CurveParams, Point, PointDecodeError, get_curve

MAGIC = b"TAKE"
BUNDLE_VERSION = 1
MAX_NODES = 0xFFFF
_N_FIELDS = 6

PathLike = Union[str, os.PathLike]


class BundleFormatError(ValueError):
    pass


class BundleIntegrityError(ValueError):
    pass


@dataclass(frozen=True)
class SecurityBundle:
    curve_name: str
    node_id: int
    keypair: KeyPair
    cert: Certificate
    kgc_Q: Point
    version: int = BUNDLE_VERSION

    @property
    def curve(self) -> CurveParams:
        return get_curve(self.curve_name)

    def to_bytes(self) -> bytes:
        curve = self.curve
        parts = [
            self.curve_name.encode("ascii"),
            self.node_id.to_bytes(2, "big"),
            self.keypair.d.to_bytes(curve.scalar_len, "big"),
            curve.encode_point(self.keypair.Q),
            self.cert.to_bytes(curve),
            curve.encode_point(self.kgc_Q),
        ]
        out = bytearray(MAGIC + bytes([self.version]))
        for p in parts:
            out += len(p).to_bytes(2, "big") + p
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "SecurityBundle":
        if len(data) < len(MAGIC) + 1 or data[: len(MAGIC)] != MAGIC:
            raise BundleFormatError("bad magic")
        version = data[len(MAGIC)]
        if version != BUNDLE_VERSION:
            raise BundleFormatError(f"unsupported bundle version {version}")
        pos = len(MAGIC) + 1
        parts = []
        for _ in range(_N_FIELDS):
            if pos + 2 > len(data):
                raise BundleFormatError("truncated bundle (length prefix)")
            n = int.from_bytes(data[pos : pos + 2], "big")
            pos += 2
            if pos + n > len(data):
                raise BundleFormatError("truncated bundle (field body)")
            parts.append(bytes(data[pos : pos + n]))
            pos += n
        if pos != len(data):
            raise BundleFormatError(f"{len(data) - pos} trailing bytes")

        name_b, id_b, d_b, q_b, cert_b, kgc_b = parts
        try:
            curve = get_curve(name_b.decode("ascii"))
        except (UnicodeDecodeError, ValueError) as exc:
            raise BundleFormatError(str(exc)) from exc
        if len(id_b) != 2 or len(d_b) != curve.scalar_len:
            raise BundleFormatError("bad id or scalar length")
        if len(cert_b) not in (cert_len(curve, False), cert_len(curve, True)):
            raise BundleFormatError("bad certificate length")
        try:
            Q = curve.decode_point(q_b)
            kgc_Q = curve.decode_point(kgc_b)
            cert = Certificate.from_bytes(cert_b, curve)
        except (PointDecodeError, DecodeError, ValueError) as exc:
            raise BundleFormatError(str(exc)) from exc
        try:
            keypair = KeyPair(int.from_bytes(d_b, "big"), Q, curve)
        except ValueError as exc:
            raise BundleIntegrityError(str(exc)) from exc

        bundle = cls(curve.name, int.from_bytes(id_b, "big"), keypair, cert, kgc_Q, version)
        bundle.check()
        return bundle

    def check(self) -> None:
        """Raise BundleIntegrityError unless the bundle is self-consistent."""
        curve = self.curve
        if self.cert.node_id != self.node_id:
            raise BundleIntegrityError("certificate id does not match node id")
        try:
            cert_Q = self.cert.public_key(curve)
        except PointDecodeError as exc:
            raise BundleIntegrityError(f"certificate key undecodable: {exc}") from exc
        if cert_Q != self.keypair.Q:
            raise BundleIntegrityError("certificate public key does not match key pair")
        if curve.mul(self.keypair.d, curve.G) != self.keypair.Q:
            raise BundleIntegrityError("private scalar does not match public key")
        if not verify_cert(self.cert, self.kgc_Q, curve):
            raise BundleIntegrityError("certificate does not verify under the KGC key")


@dataclass
class NetworkManifest:
    node_ids: list
    curve_name: str
    kgc_Q: Point
    seed_fingerprint: str
    compressed: bool = False
    version: int = BUNDLE_VERSION

    def __post_init__(self):
        if len(set(self.node_ids)) != len(self.node_ids):
            raise ValueError("node ids must be pairwise distinct")

    def to_json(self) -> str:
        curve = get_curve(self.curve_name)
        doc = {
            "format_version": self.version,
            "curve": self.curve_name,
            "compressed_certificates": self.compressed,
            "kgc_public_key": curve.encode_point(self.kgc_Q).hex(),
            "seed_fingerprint": self.seed_fingerprint,
            "node_count": len(self.node_ids),
            "nodes": list(self.node_ids),
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "NetworkManifest":
        doc = json.loads(text)
        curve = get_curve(doc["curve"])
        return cls(
            node_ids=list(doc["nodes"]),
            curve_name=doc["curve"],
            kgc_Q=curve.decode_point(bytes.fromhex(doc["kgc_public_key"])),
            seed_fingerprint=doc["seed_fingerprint"],
            compressed=doc["compressed_certificates"],
            version=doc["format_version"],
        )


@dataclass
class ProvisionedNetwork:
    manifest: NetworkManifest
    bundles: list = field(repr=False)
    kgc_d: int = field(repr=False)

    def __iter__(self):
        # allows ``manifest, bundles, kgc_d = generate_network(...)``
        return iter((self.manifest, self.bundles, self.kgc_d))

    def bundle(self, node_id: int) -> SecurityBundle:
        return self.bundles[self.manifest.node_ids.index(node_id)]


def seed_fingerprint(seed: Seed) -> str:
    return hashlib.sha256(seed_bytes(seed)).hexdigest()[:16]


def generate_network(
    n: int,
    curve: CurveParams = SECP160R1,
    master_seed: Seed = 0,
    compressed: bool = False,
) -> ProvisionedNetwork:
    """Key pairs and certificates for nodes 1..n under one fresh KGC."""
    if not 1 <= n <= MAX_NODES:
        raise ValueError(f"node count must be in 1..{MAX_NODES}, got {n}")
    if master_seed is None:
        raise ValueError("generate_network needs an explicit master seed")
    kgc = keygen(curve, derive_bytes(master_seed, "kgc-key", 32))
    bundles = []
    seen = set()
    for node_id in range(1, n + 1):
        kp = keygen(curve, derive_bytes(master_seed, "node-key", 32, node_id))
        redraw = 0
        while kp.Q in seen:
            # only reachable on tiny test groups
            redraw += 1
            kp = keygen(curve, derive_bytes(master_seed, "node-key", 32, node_id, redraw))
        seen.add(kp.Q)
        cert = issue(node_id, kp.Q, kgc.d, curve, compressed, seed=derive_bytes(master_seed, "cert-sig", 32, node_id))
        bundles.append(SecurityBundle(curve.name, node_id, kp, cert, kgc.Q))
    manifest = NetworkManifest(list(range(1, n + 1)), curve.name, kgc.Q, seed_fingerprint(master_seed), compressed)
    return ProvisionedNetwork(manifest, bundles, kgc.d)


def write_bundle(bundle: SecurityBundle, path: PathLike) -> None:
    Path(path).write_bytes(bundle.to_bytes())


def read_bundle(path: PathLike) -> SecurityBundle:
    return SecurityBundle.from_bytes(Path(path).read_bytes())


def bundle_filename(node_id: int) -> str:
    return f"node_{node_id}.take"


def write_network(
    net: ProvisionedNetwork,
    out_dir: PathLike,
    kgc_key_path: Optional[PathLike] = None,
) -> Path:
    """Write manifest.json and one bundle per node.

    The KGC private key is only written when ``kgc_key_path`` is given, and
    never inside ``out_dir`` by default.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(net.manifest.to_json())
    for b in net.bundles:
        write_bundle(b, out / bundle_filename(b.node_id))
    if kgc_key_path is not None:
        curve = get_curve(net.manifest.curve_name)
        Path(kgc_key_path).write_text(net.kgc_d.to_bytes(curve.scalar_len, "big").hex() + "\n")
    return out


def load_network_dir(path: PathLike) -> tuple[NetworkManifest, list]:
    d = Path(path)
    manifest = NetworkManifest.from_json((d / "manifest.json").read_text())
    bundles = [read_bundle(d / bundle_filename(i)) for i in manifest.node_ids]
    return manifest, bundles
