"""Stealth-address flows over an additively homomorphic backend.

The receiver publishes a meta-address bundle: a curve spending public key, a
homomorphic-encryption public key, and the encryption of the spending private
key under it.  A sender draws a one-time curve key pair, homomorphically adds
its private scalar into the receiver's encrypted spending key, derives the
stealth address from the sum of the two public points, and broadcasts the
combined ciphertext.  Only the receiver can decrypt the one-time private key;
the sender never learns it and keeps no copy of the ephemeral scalar.

Two interchangeable backends implement the encrypted-scalar arithmetic:
Paillier (2048-bit modulus) and additive-only BFV (desk-128bit profile).
The one decrypted quantity is the integer sum of two curve scalars, which is
reduced mod the group order before use; the sender resamples whenever the
combined public point would be the identity, so an honest sum never reduces
to zero.
"""

from __future__ import annotations

import base64
import dataclasses
import enum
import random
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Iterable

from . import bfv, curve, paillier
from .curve import CurvePoint, CurveScalar, EthAddress
from .errors import AddressMismatch, IdentityPoint, KeyMismatch, SapError, SchemaViolation

WIRE_VERSION = 1
_RESAMPLE_LIMIT = 64


class SchemeId(enum.Enum):
    DKSAP_PLAIN = "dksap-plain"
    HE_PAILLIER = "he-paillier"
    FHE_BFV = "fhe-bfv"

    @classmethod
    def from_wire(cls, value: str) -> "SchemeId":
        if value == "dksap":  # plain announcements use the short wire tag
            return cls.DKSAP_PLAIN
        for member in cls:
            if member.value == value:
                return member
        raise SchemaViolation(f"unknown scheme {value!r}")


@dataclass(frozen=True)
class MetaAddressBundle:
    """Receiver's public bundle: spend point, HE key, encrypted spend scalar."""

    scheme: SchemeId
    spend_pubkey: CurvePoint
    he_public: Any
    encrypted_spend: Any

    def to_json(self) -> dict:
        backend = _backend_for(self.scheme)
        return {
            "v": WIRE_VERSION,
            "scheme": self.scheme.value,
            "pk2": self.spend_pubkey.hex(),
            "pkb": backend.pk_to_json(self.he_public),
            "c2": backend.ct_to_wire(self.encrypted_spend),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MetaAddressBundle":
        if doc.get("v") != WIRE_VERSION:
            raise SchemaViolation("unsupported bundle version")
        scheme = SchemeId.from_wire(doc["scheme"])
        if scheme is SchemeId.DKSAP_PLAIN:
            raise SchemaViolation("plain scheme has no homomorphic bundle")
        backend = _backend_for(scheme)
        he_public = backend.pk_from_json(doc["pkb"])
        return cls(
            scheme=scheme,
            spend_pubkey=CurvePoint.from_hex(doc["pk2"]),
            he_public=he_public,
            encrypted_spend=backend.ct_from_wire(he_public, doc["c2"], combined=False),
        )


@dataclass(frozen=True)
class ReceiverSecrets:
    scheme: SchemeId
    spend_priv: CurveScalar
    he_secret: Any


@dataclass(frozen=True)
class Announcement:
    """Public payment record: combined ciphertext plus stealth address."""

    scheme: SchemeId
    ciphertext: Any
    stealth: EthAddress | None
    created_at: str

    def to_json(self) -> dict:
        backend = _backend_for(self.scheme)
        doc = {
            "v": WIRE_VERSION,
            "scheme": self.scheme.value,
            "c": backend.ct_to_wire(self.ciphertext),
            "created_at": self.created_at,
        }
        if self.stealth is not None:
            doc["sa"] = str(self.stealth)
        return doc

    @classmethod
    def from_json(cls, doc: dict, bundle: MetaAddressBundle) -> "Announcement":
        if doc.get("v") != WIRE_VERSION:
            raise SchemaViolation("unsupported announcement version")
        scheme = SchemeId.from_wire(doc["scheme"])
        if scheme is SchemeId.DKSAP_PLAIN:
            raise SchemaViolation("plain announcements are not homomorphic records")
        backend = _backend_for(scheme)
        stealth = EthAddress.from_string(doc["sa"]) if "sa" in doc else None
        return cls(
            scheme=scheme,
            ciphertext=backend.ct_from_wire(bundle.he_public, doc["c"], combined=True),
            stealth=stealth,
            created_at=doc.get("created_at", ""),
        )


@dataclass(frozen=True)
class SenderView:
    """What the sender learns: the one-time point and its address."""

    one_time_pubkey: CurvePoint
    stealth: EthAddress


@dataclass(frozen=True)
class RecoveredWallet:
    secret_key: CurveScalar
    stealth: EthAddress


@dataclass(frozen=True)
class ScanSummary:
    wallets: list[RecoveredWallet]
    skipped_scheme: int
    failed: int


# ---------------------------------------------------------------------------
# Backends


class _PaillierBackend:
    def __init__(self, bits: int = 2048):
        self.bits = bits

    def keygen(self, rng: random.Random):
        return paillier.keygen(self.bits, rng)

    def encrypt_int(self, pub, value: int, rng: random.Random):
        return paillier.encrypt(pub, value, rng)

    def add(self, ct1, ct2):
        return paillier.add(ct1, ct2)

    def decrypt_int(self, sec, pub, ct) -> int:
        return paillier.decrypt(sec, pub, ct)

    def pk_to_json(self, pub) -> dict:
        return {"n": f"{pub.n:x}", "g": f"{pub.g:x}"}

    def pk_from_json(self, doc: dict):
        return paillier.PaillierPublicKey(int(doc["n"], 16), int(doc["g"], 16))

    def ct_to_wire(self, ct) -> str:
        return ct.to_bytes().hex()

    def ct_from_wire(self, pub, text: str, *, combined: bool):
        return paillier.PaillierCiphertext.from_bytes(pub, bytes.fromhex(text))


class _BfvBackend:
    def __init__(self, profile: str = "desk-128bit"):
        self.params = bfv.setup(profile)

    def keygen(self, rng: random.Random):
        return bfv.keygen(self.params, rng)

    def encrypt_int(self, pub, value: int, rng: random.Random):
        return bfv.encrypt(pub, bfv.encode_scalar(value, self.params), self.params, rng)

    def add(self, ct1, ct2):
        return bfv.add(ct1, ct2)

    def decrypt_int(self, sec, pub, ct) -> int:
        return bfv.decode_scalar(bfv.decrypt(sec, ct, self.params), self.params)

    def pk_to_json(self, pub) -> dict:
        return {
            "profile": self.params.profile,
            "blob": base64.b64encode(bfv.pubkey_to_bytes(pub)).decode(),
        }

    def pk_from_json(self, doc: dict):
        params = bfv.setup(doc["profile"])
        return bfv.pubkey_from_bytes(params, base64.b64decode(doc["blob"]))

    def ct_to_wire(self, ct) -> str:
        return base64.b64encode(bfv.ciphertext_to_bytes(ct)).decode()

    def ct_from_wire(self, pub, text: str, *, combined: bool):
        ct = bfv.ciphertext_from_bytes(
            self.params, base64.b64decode(text), add_count=1 if combined else 0
        )
        # the wire format carries no key fingerprint; bind the claimed key so
        # fresh encryptions can be added (a wrong claim surfaces later as an
        # address mismatch on recovery)
        return dataclasses.replace(ct, key_id=pub.key_id)


def _backend_for(scheme: SchemeId, **options):
    if scheme is SchemeId.HE_PAILLIER:
        return _PaillierBackend(**options)
    if scheme is SchemeId.FHE_BFV:
        return _BfvBackend(**options)
    raise ValueError(f"no homomorphic backend for {scheme}")


# ---------------------------------------------------------------------------
# Protocol operations


def receiver_setup(
    scheme: SchemeId,
    rng: random.Random,
    *,
    paillier_bits: int = 2048,
    bfv_profile: str = "desk-128bit",
) -> tuple[MetaAddressBundle, ReceiverSecrets]:
    """Create the receiver's spending key pair and HE key pair, and publish
    the bundle (spend point, HE public key, encrypted spend scalar)."""
    if scheme is SchemeId.HE_PAILLIER:
        backend = _PaillierBackend(paillier_bits)
    elif scheme is SchemeId.FHE_BFV:
        backend = _BfvBackend(bfv_profile)
    else:
        raise ValueError("receiver_setup applies to the homomorphic schemes only")
    spend = curve.keygen(rng)
    he_public, he_secret = backend.keygen(rng)
    encrypted_spend = backend.encrypt_int(he_public, spend.sk.value, rng)
    bundle = MetaAddressBundle(scheme, spend.pk, he_public, encrypted_spend)
    secrets = ReceiverSecrets(scheme, spend.sk, he_secret)
    return bundle, secrets


def sender_send(
    bundle: MetaAddressBundle,
    rng: random.Random,
    *,
    include_address: bool = True,
) -> tuple[Announcement, SenderView]:
    """One payment: fresh ephemeral key, encrypted-scalar addition, address.

    The ephemeral private scalar is used once and not returned; the sender
    keeps only the public view.  include_address=False is the strict mode
    that omits the stealth address from the broadcast record.
    """
    backend = _backend_for(bundle.scheme)
    for _ in range(_RESAMPLE_LIMIT):
        ephemeral = curve.keygen(rng)
        one_time_pub = curve.point_add(ephemeral.pk, bundle.spend_pubkey)
        if not one_time_pub.infinity:
            break
    else:
        raise IdentityPoint("could not find a non-degenerate ephemeral key")
    encrypted_ephemeral = backend.encrypt_int(bundle.he_public, ephemeral.sk.value, rng)
    combined = backend.add(encrypted_ephemeral, bundle.encrypted_spend)
    stealth = curve.pk_to_address(one_time_pub)
    announcement = Announcement(
        scheme=bundle.scheme,
        ciphertext=combined,
        stealth=stealth if include_address else None,
        created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    return announcement, SenderView(one_time_pub, stealth)


def receiver_recover(
    announcement: Announcement,
    secrets: ReceiverSecrets,
    bundle: MetaAddressBundle,
) -> RecoveredWallet:
    """Decrypt the combined ciphertext, reduce mod the group order, and verify
    the announced address before handing back the one-time wallet."""
    if announcement.scheme is not secrets.scheme or bundle.scheme is not secrets.scheme:
        raise KeyMismatch("announcement, secrets, and bundle schemes must match")
    backend = _backend_for(announcement.scheme)
    total = backend.decrypt_int(secrets.he_secret, bundle.he_public, announcement.ciphertext)
    reduced = total % curve.ORDER
    if reduced == 0:
        raise AddressMismatch("decrypted key sum reduced to zero")
    secret_key = CurveScalar(reduced)
    derived = curve.pk_to_address(curve.scalar_mul(secret_key, curve.GENERATOR))
    if announcement.stealth is not None and derived != announcement.stealth:
        raise AddressMismatch(
            f"derived {derived} but announcement carries {announcement.stealth}"
        )
    return RecoveredWallet(secret_key, derived)


def receiver_scan(
    documents: Iterable[dict],
    secrets: ReceiverSecrets,
    bundle: MetaAddressBundle,
) -> ScanSummary:
    """Attempt recovery on registry documents.

    Entries for other schemes are skipped and counted; entries that parse but
    do not recover (foreign or corrupted announcements) count as failed.
    """
    wallets: list[RecoveredWallet] = []
    skipped = 0
    failed = 0
    for doc in documents:
        try:
            scheme = SchemeId.from_wire(doc.get("scheme", ""))
        except SchemaViolation:
            skipped += 1
            continue
        if scheme is not secrets.scheme:
            skipped += 1
            continue
        try:
            announcement = Announcement.from_json(doc, bundle)
            wallets.append(receiver_recover(announcement, secrets, bundle))
        except SapError:
            failed += 1
    return ScanSummary(wallets, skipped, failed)
