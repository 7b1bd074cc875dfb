"""Plain dual-key stealth addressing: sender derivation, receiver derivation,
and announcement scanning.

The receiver publishes (to counterparties, not on-chain) a scan public key and
a spend public key.  For each payment the sender draws an ephemeral key pair,
hashes the ECDH shared point into a scalar c, and pays to the one-time key
c*G + spend_pub.  Only the holder of the scan and spend private keys can
recompute c and hence the one-time private key c + spend_priv.

All functions are pure over immutable inputs; scanning a partitioned
announcement list and merging by index gives the same result as one pass.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple

from . import curve
from .curve import CurvePoint, CurveScalar, EthAddress, WalletKeyPair
from .errors import DegenerateSharedSecret, SapError
from .keccak import keccak256

_RESAMPLE_LIMIT = 64


@dataclass(frozen=True)
class DkReceiverKeys:
    """Receiver's scan and spend key pairs."""

    scan: WalletKeyPair
    spend: WalletKeyPair


@dataclass(frozen=True)
class DkAnnouncement:
    """Public record of one payment: ephemeral point plus stealth address."""

    ephemeral: CurvePoint
    stealth: EthAddress

    def to_json(self) -> dict:
        return {"scheme": "dksap", "R_a": self.ephemeral.hex(), "sa": str(self.stealth)}

    @classmethod
    def from_json(cls, doc: dict) -> "DkAnnouncement":
        if doc.get("scheme") != "dksap":
            raise ValueError("not a dksap announcement")
        point = CurvePoint.from_hex(doc["R_a"])
        if point.infinity:
            raise ValueError("ephemeral point is the identity")
        return cls(point, EthAddress.from_string(doc["sa"]))


class ScanMatch(NamedTuple):
    index: int
    one_time_sk: CurveScalar


class ScanResult(NamedTuple):
    matches: list[ScanMatch]
    malformed: int


def receiver_keygen(rng: random.Random) -> DkReceiverKeys:
    return DkReceiverKeys(scan=curve.keygen(rng), spend=curve.keygen(rng))


def shared_secret_scalar(point: CurvePoint) -> CurveScalar:
    """Hash a DH point into a scalar: keccak over the 33-byte compressed
    encoding, interpreted big-endian, reduced mod the group order.

    Raises DegenerateSharedSecret on the (negligible-probability) zero result.
    """
    value = int.from_bytes(keccak256(point.to_bytes()), "big") % curve.ORDER
    if value == 0:
        raise DegenerateSharedSecret("hashed shared secret reduced to zero")
    return CurveScalar(value)


def sender_derive(
    rng: random.Random, scan_pub: CurvePoint, spend_pub: CurvePoint
) -> tuple[DkAnnouncement, CurvePoint]:
    """Derive a fresh one-time destination for the receiver.

    Returns the announcement (ephemeral point + stealth address) and the
    one-time public key itself.  Degenerate draws (zero shared-secret hash,
    or a one-time key equal to the identity) are resampled internally.
    """
    if scan_pub.infinity or spend_pub.infinity:
        raise SapError("receiver public keys must not be the identity")
    for _ in range(_RESAMPLE_LIMIT):
        ephemeral = curve.keygen(rng)
        try:
            c = shared_secret_scalar(curve.scalar_mul(ephemeral.sk, scan_pub))
        except DegenerateSharedSecret:
            continue
        one_time = curve.point_add(curve.scalar_mul(c, curve.GENERATOR), spend_pub)
        if one_time.infinity:
            continue
        ann = DkAnnouncement(ephemeral.pk, curve.pk_to_address(one_time))
        return ann, one_time
    raise DegenerateSharedSecret("resampling budget exhausted")


def receiver_derive(
    ephemeral_pub: CurvePoint, keys: DkReceiverKeys
) -> tuple[CurveScalar, EthAddress]:
    """Recompute the one-time private key and stealth address for one
    announcement's ephemeral point."""
    if ephemeral_pub.infinity:
        raise SapError("ephemeral point must not be the identity")
    c = shared_secret_scalar(curve.scalar_mul(keys.scan.sk, ephemeral_pub))
    one_time_sk = curve.scalar_add(c, keys.spend.sk)
    stealth = curve.pk_to_address(curve.scalar_mul(one_time_sk, curve.GENERATOR))
    return one_time_sk, stealth


def scan(announcements: list[DkAnnouncement], keys: DkReceiverKeys) -> ScanResult:
    """Return the announcements addressed to *keys*.

    Each entry is re-derived and kept only when the recomputed address equals
    the stored one.  Entries that cannot be processed (identity ephemeral,
    degenerate derivation) are skipped and counted as malformed.
    """
    matches: list[ScanMatch] = []
    malformed = 0
    for index, ann in enumerate(announcements):
        try:
            one_time_sk, stealth = receiver_derive(ann.ephemeral, keys)
        except SapError:
            malformed += 1
            continue
        if stealth == ann.stealth:
            matches.append(ScanMatch(index, one_time_sk))
    return ScanResult(matches, malformed)
