"""Built-in correctness checks for `sap selftest`.

Runs the tiny-parameter exhaustive suites (Paillier with p=5, q=7; the
test-tiny ring profile) plus one end-to-end identity per scheme.  Each check
either returns silently or raises :class:`CheckFailed` naming the violated
invariant; the runner prints one pass/fail line per check.

The ``faults`` argument exists for exercising the runner itself: a named
fault corrupts one well-defined input so the corresponding invariant must
trip (e.g. ``announcement-bitflip``).
"""

from __future__ import annotations

import base64
import random
import time
from typing import Callable

import numpy as np

from . import bfv, dksap, engine, paillier
from .curve import GENERATOR, scalar_mul
from .engine import SchemeId
from .errors import AddressMismatch, SapError

_TINY_PRIMES = (5, 7)


class CheckFailed(AssertionError):
    """A named invariant did not hold."""


def _check_paillier_tiny(rng: random.Random, faults: frozenset) -> None:
    pk, sk = paillier._keypair_from_primes(*_TINY_PRIMES)
    n = pk.n
    for m in range(n):
        if paillier.decrypt(sk, pk, paillier.encrypt(pk, m, rng)) != m:
            raise CheckFailed(f"paillier-roundtrip: m={m} did not survive enc/dec")
    for m1 in range(n):
        for m2 in range(n):
            total = paillier.add(
                paillier.encrypt(pk, m1, rng), paillier.encrypt(pk, m2, rng)
            )
            if paillier.decrypt(sk, pk, total) != (m1 + m2) % n:
                raise CheckFailed(
                    f"paillier-additive-law: E({m1})*E({m2}) != E({m1}+{m2} mod n)"
                )


def _check_ring_arithmetic_tiny(rng: random.Random, faults: frozenset) -> None:
    params = bfv.setup("test-tiny")
    n, q = params.n, params.q
    for _ in range(100):
        a = [rng.randrange(q) for _ in range(n)]
        b = [rng.randrange(q) for _ in range(n)]
        got = params.ntt.negacyclic_mul(
            np.array(a, dtype=np.uint64), np.array(b, dtype=np.uint64)
        )
        for k in range(n):
            want = sum(a[i] * b[k - i] for i in range(k + 1))
            want -= sum(a[i] * b[k - i + n] for i in range(k + 1, n))
            if int(got[k]) != want % q:
                raise CheckFailed(
                    f"ring-arithmetic: transform product disagrees with "
                    f"direct negacyclic convolution at coefficient {k}"
                )


def _check_bfv_tiny_zero_noise(rng: random.Random, faults: frozenset) -> None:
    params = bfv.setup("test-tiny")
    zeros = np.zeros(params.n, dtype=np.int64)
    pk, sk = bfv._keygen_with(
        params, zeros, zeros, bfv._sample_uniform(params.n, params.q, rng)
    )
    for _ in range(200):
        m = bfv.RingElem.from_ints(
            [rng.randrange(params.t) for _ in range(params.n)], params.t
        )
        ct = bfv._encrypt_with(pk, m, params, zeros, zeros, zeros)
        if bfv.decrypt(sk, ct, params, expected=m) != m:
            raise CheckFailed("bfv-zero-noise: noise-free ciphertext did not decrypt exactly")


def _check_plain_identity(rng: random.Random, faults: frozenset) -> None:
    keys = dksap.receiver_keygen(rng)
    for _ in range(20):
        announcement, one_time_pub = dksap.sender_derive(rng, keys.scan.pk, keys.spend.pk)
        one_time_sk, stealth = dksap.receiver_derive(announcement.ephemeral, keys)
        if scalar_mul(one_time_sk, GENERATOR) != one_time_pub:
            raise CheckFailed("plain-key-identity: receiver key does not match sender point")
        if stealth != announcement.stealth:
            raise CheckFailed("plain-address-identity: derived address differs")


def _flip_ciphertext_bit(doc: dict, scheme: SchemeId) -> dict:
    if scheme is SchemeId.HE_PAILLIER:
        raw = bytearray.fromhex(doc["c"])
        raw[len(raw) // 2] ^= 0x04
        doc["c"] = raw.hex()
    else:
        raw = bytearray(base64.b64decode(doc["c"]))
        raw[len(raw) // 2] ^= 0x04  # lands in a ciphertext coefficient, not the header
        doc["c"] = base64.b64encode(bytes(raw)).decode()
    return doc


def _check_he_identity(scheme: SchemeId, rng: random.Random, faults: frozenset) -> None:
    bundle, secrets = engine.receiver_setup(scheme, rng)
    for _ in range(5):
        announcement, view = engine.sender_send(bundle, rng)
        if "announcement-bitflip" in faults:
            doc = _flip_ciphertext_bit(announcement.to_json(), scheme)
            announcement = engine.Announcement.from_json(doc, bundle)
        try:
            wallet = engine.receiver_recover(announcement, secrets, bundle)
        except AddressMismatch as exc:
            raise CheckFailed(f"stealth-address-identity: {exc}") from None
        except SapError as exc:
            raise CheckFailed(f"stealth-address-identity: recovery failed ({exc})") from None
        if wallet.stealth != view.stealth:
            raise CheckFailed("stealth-address-identity: receiver address differs from sender")


def run_selftest(
    rng: random.Random | None = None,
    *,
    faults: frozenset = frozenset(),
    emit: Callable[[str], None] = print,
) -> bool:
    """Run every check; print one line each; return overall success."""
    rng = rng or random.Random()
    checks: list[tuple[str, Callable]] = [
        ("paillier-tiny-exhaustive", _check_paillier_tiny),
        ("ring-arithmetic-tiny", _check_ring_arithmetic_tiny),
        ("bfv-tiny-zero-noise", _check_bfv_tiny_zero_noise),
        ("plain-end-to-end", _check_plain_identity),
        ("paillier-end-to-end", lambda r, f: _check_he_identity(SchemeId.HE_PAILLIER, r, f)),
        ("bfv-end-to-end", lambda r, f: _check_he_identity(SchemeId.FHE_BFV, r, f)),
    ]
    all_ok = True
    started = time.perf_counter()
    for name, check in checks:
        try:
            check(rng, faults)
        except CheckFailed as exc:
            emit(f"FAIL {name}: {exc}")
            all_ok = False
        else:
            emit(f"PASS {name}")
    emit(f"selftest {'passed' if all_ok else 'FAILED'} in {time.perf_counter() - started:.1f}s")
    return all_ok
