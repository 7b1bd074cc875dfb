"""Benchmark harness: per-scheme send+recover timing and on-chain storage
sizes.

One iteration times a full sender_send + receiver_recover cycle against a
prebuilt receiver bundle; key generation is excluded unless requested, since
it dominates the Paillier column and would distort the comparison.  Reports
are plain dataclasses; rendering helpers produce a fixed-column CSV
(scheme,iterations,mean_s,max_s,min_s) and human-readable tables.

Absolute timings are machine-specific.  The stable claims, asserted by the
acceptance suite, are the ordering (plain < additive-BFV < Paillier) and the
Paillier/plain mean ratio floor.
"""

from __future__ import annotations

import base64
import random
import statistics
import time
from dataclasses import dataclass, field

from . import dksap, engine
from .engine import SchemeId

MIN_ITERATIONS = 30

_PUBKEY_SIZE_NOTE = (
    "sometimes tabulated as 160 bits, which is the 20-byte address rendering; "
    "a compressed curve point serializes to 33 bytes"
)
_PAILLIER_CT_NOTE = (
    "48-bit figures are sometimes quoted for this row but are inconsistent "
    "with a sound instantiation: a Paillier ciphertext occupies 2*|n| bits"
)


@dataclass(frozen=True)
class StorageRow:
    label: str
    byte_size: int
    note: str = ""


@dataclass(frozen=True)
class BenchReport:
    scheme: SchemeId
    iterations: int
    mean_s: float
    max_s: float
    min_s: float
    with_keygen: bool
    storage: list[StorageRow] = field(default_factory=list)


def _plain_fixture(rng: random.Random):
    keys = dksap.receiver_keygen(rng)

    def cycle():
        announcement, _ = dksap.sender_derive(rng, keys.scan.pk, keys.spend.pk)
        _, stealth = dksap.receiver_derive(announcement.ephemeral, keys)
        assert stealth == announcement.stealth

    def keygen_and_cycle():
        fresh = dksap.receiver_keygen(rng)
        announcement, _ = dksap.sender_derive(rng, fresh.scan.pk, fresh.spend.pk)
        dksap.receiver_derive(announcement.ephemeral, fresh)

    announcement, _ = dksap.sender_derive(rng, keys.scan.pk, keys.spend.pk)
    storage = [
        StorageRow("PK_scan", len(keys.scan.pk.to_bytes()), _PUBKEY_SIZE_NOTE),
        StorageRow("PK_spend", len(keys.spend.pk.to_bytes())),
        StorageRow("R_a", len(announcement.ephemeral.to_bytes())),
        StorageRow("stealth_address", len(announcement.stealth.raw)),
    ]
    return cycle, keygen_and_cycle, storage


def _he_fixture(scheme: SchemeId, rng: random.Random):
    bundle, secrets = engine.receiver_setup(scheme, rng)

    def cycle():
        announcement, view = engine.sender_send(bundle, rng)
        wallet = engine.receiver_recover(announcement, secrets, bundle)
        assert wallet.stealth == view.stealth

    def keygen_and_cycle():
        fresh_bundle, fresh_secrets = engine.receiver_setup(scheme, rng)
        announcement, _ = engine.sender_send(fresh_bundle, rng)
        engine.receiver_recover(announcement, fresh_secrets, fresh_bundle)

    announcement, _ = engine.sender_send(bundle, rng)
    backend = engine._backend_for(scheme)
    he_pk_doc = backend.pk_to_json(bundle.he_public)
    if scheme is SchemeId.HE_PAILLIER:
        decode = bytes.fromhex
        he_pk_size = sum(len(value) // 2 for value in he_pk_doc.values())
        ct_note = _PAILLIER_CT_NOTE
    else:
        decode = base64.b64decode
        he_pk_size = len(base64.b64decode(he_pk_doc["blob"]))
        ct_note = "two-polynomial array, 8-byte words, plus parameter fingerprint"
    ct_size = len(decode(backend.ct_to_wire(bundle.encrypted_spend)))
    combined_size = len(decode(backend.ct_to_wire(announcement.ciphertext)))
    storage = [
        StorageRow("PK_bob", len(bundle.spend_pubkey.to_bytes()), _PUBKEY_SIZE_NOTE),
        StorageRow("PK_fhe_bob", he_pk_size),
        StorageRow("C2", ct_size),
        StorageRow("C", combined_size, ct_note),
    ]
    return cycle, keygen_and_cycle, storage


def run_bench(
    schemes: list[SchemeId],
    iterations: int,
    rng: random.Random,
    *,
    with_keygen: bool = False,
) -> list[BenchReport]:
    """Time *iterations* send+recover cycles per scheme (single-threaded)."""
    if iterations < MIN_ITERATIONS:
        raise ValueError(f"need at least {MIN_ITERATIONS} iterations, got {iterations}")
    reports = []
    for scheme in schemes:
        if scheme is SchemeId.DKSAP_PLAIN:
            cycle, keygen_cycle, storage = _plain_fixture(rng)
        else:
            cycle, keygen_cycle, storage = _he_fixture(scheme, rng)
        timed = keygen_cycle if with_keygen else cycle
        samples = []
        for _ in range(iterations):
            start = time.perf_counter()
            timed()
            samples.append(time.perf_counter() - start)
        reports.append(
            BenchReport(
                scheme=scheme,
                iterations=iterations,
                mean_s=statistics.fmean(samples),
                max_s=max(samples),
                min_s=min(samples),
                with_keygen=with_keygen,
                storage=storage,
            )
        )
    return reports


def to_csv(reports: list[BenchReport]) -> str:
    lines = ["scheme,iterations,mean_s,max_s,min_s"]
    for report in reports:
        lines.append(
            f"{report.scheme.value},{report.iterations},"
            f"{report.mean_s:.6f},{report.max_s:.6f},{report.min_s:.6f}"
        )
    return "\n".join(lines) + "\n"


def format_timing_table(reports: list[BenchReport]) -> str:
    lines = []
    mode = "send+recover incl. receiver keygen" if reports and reports[0].with_keygen \
        else "send+recover on a prebuilt bundle"
    lines.append(f"timing per iteration ({mode})")
    header = f"{'scheme':<14} {'iters':>6} {'mean (s)':>10} {'max (s)':>10} {'min (s)':>10}"
    lines.append(header)
    lines.append("-" * len(header))
    for report in reports:
        lines.append(
            f"{report.scheme.value:<14} {report.iterations:>6} "
            f"{report.mean_s:>10.5f} {report.max_s:>10.5f} {report.min_s:>10.5f}"
        )
    return "\n".join(lines)


def format_storage_table(reports: list[BenchReport]) -> str:
    lines = ["on-chain storage (true serialized sizes)"]
    for report in reports:
        lines.append(f"  {report.scheme.value}:")
        for row in report.storage:
            note = f"  # {row.note}" if row.note else ""
            lines.append(f"    {row.label:<16} {row.byte_size:>8} bytes{note}")
    return "\n".join(lines)
